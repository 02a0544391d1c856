// hypaccel: evaluate and study accelerated q+1Fq series from the shell.
//
//   hypaccel eval --upper 1+4i,1.5+4.5i --lower 3+i --z 1 --m 30
//   hypaccel trace --upper 0.5,0.5 --lower 2 --z 1 --m 0,2,5,10
//   hypaccel campaign --branch --R 5 --count 1000

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hypaccel/hypaccel.hpp"

using json = nlohmann::ordered_json;
using namespace hypaccel;

namespace {

struct Options {
    std::string upper;
    std::string lower;
    std::string z;
    std::string m_text = "45";
    std::optional<long> N;
    double eps = 2e-14;
    double tau = 0.1;
    std::string precision = "double";
    std::string variant = "modified";
    std::uint64_t seed = 1;
    long count = 1000;
    double R = 5.0;
    bool branch = false;
    int q = 1;
    std::string format;
    std::string reference;
    std::string out;
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<std::string> split_commas(const std::string& text)
{
    std::vector<std::string> parts;
    if (text.empty()) return parts;
    std::string cur;
    for (char ch : text) {
        if (ch == ',') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    parts.push_back(cur);
    return parts;
}

template <class C>
std::vector<C> parse_list(const std::string& text)
{
    std::vector<C> out;
    for (const std::string& p : split_commas(text)) out.push_back(parse_complex<C>(p));
    return out;
}

std::vector<std::size_t> parse_orders(const std::string& text, bool allow_zero)
{
    std::vector<std::size_t> out;
    for (const std::string& p : split_commas(text)) {
        std::size_t used = 0;
        long v = 0;
        try {
            v = std::stol(p, &used);
        } catch (const std::exception&) {
            throw UsageError("--m: bad order '" + p + "'");
        }
        if (used != p.size() || v < (allow_zero ? 0 : 1)) throw UsageError("--m: bad order '" + p + "'");
        out.push_back(static_cast<std::size_t>(v));
    }
    if (out.empty()) throw UsageError("--m: no order given");
    return out;
}

std::size_t single_order(const Options& o)
{
    const auto ms = parse_orders(o.m_text, false);
    if (ms.size() != 1) throw UsageError("--m: expected a single order");
    return ms.front();
}

TruncationVariant parse_variant(const std::string& v)
{
    if (v == "modified") return TruncationVariant::Modified;
    if (v == "plain") return TruncationVariant::Plain;
    throw UsageError("--variant must be modified or plain");
}

json number_or_null(double v)
{
    if (std::isfinite(v)) return v;
    return nullptr;
}

template <class C>
json complex_json(const C& c)
{
    return json::array({number_or_null(re_d(c)), number_or_null(im_d(c))});
}

template <class C>
C from_extended(const ExtendedComplex& e)
{
    if constexpr (std::is_same_v<C, ExtendedComplex>) return e;
    else return to_machine(e);
}

template <class C>
HypergeometricParams<C> read_params(const Options& o)
{
    if (o.upper.empty()) throw UsageError("--upper is required");
    return {parse_list<C>(o.upper), parse_list<C>(o.lower)};
}

template <class C>
C read_z(const Options& o)
{
    if (o.z.empty()) throw UsageError("--z is required");
    return parse_complex<C>(o.z);
}

/// Reference for error traces: --reference, else Gauss at z = 1, the 1F0
/// closed form, or a direct sum for |z| <= 0.9.
template <class C>
C trace_reference(const Options& o, const HypergeometricParams<C>& params, const C& z)
{
    if (!o.reference.empty()) return parse_complex<C>(o.reference);
    using E = ExtendedComplex;
    const auto pe = params.template as<E>();
    const E ze(to_machine(z));
    if (ze == E(1.0) && pe.q() == 1) return from_extended<C>(gauss_2f1_at_one(pe));
    if (pe.q() == 0 && !(ze == E(1.0))) return from_extended<C>(closed_form_1f0(pe.upper()[0], ze));
    if (magnitude(ze) <= 0.9) return from_extended<C>(direct_sum(pe, ze, 1e-31, 1000000));
    throw domain_error("no reference value available; pass --reference");
}

std::string csv_number(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6e", v);
    return std::isfinite(v) ? std::string(buf) : std::string("nan");
}

int exit_code(EvalStatus s)
{
    switch (s) {
    case EvalStatus::Converged: return 0;
    case EvalStatus::InsufficientPrecision: return 2;
    case EvalStatus::MaxIterations: return 3;
    }
    return 1;
}

// ---------------------------------------------------------------------------

template <class C>
int cmd_eval(const Options& o, std::ostream& os)
{
    const auto params = read_params<C>(o);
    const C z = read_z<C>(o);
    const EngineConfig cfg{single_order(o), o.N.value_or(2000), o.eps, o.tau, parse_variant(o.variant)};
    const EvalOutcome<C> r = evaluate(params, make_point(z), cfg);

    if (o.format == "csv") {
        os << "status,re,im,rel_err_est,n_used,max_partial_sum_mag,underflow_seen\n";
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g,%.17g", re_d(r.value), im_d(r.value));
        os << to_string(r.status) << ',' << buf << ',' << csv_number(r.rel_err_est) << ',' << r.n_used << ','
           << csv_number(r.diagnostics.max_partial_sum_mag) << ',' << (r.diagnostics.underflow_seen ? 1 : 0)
           << '\n';
        return exit_code(r.status);
    }
    json j;
    j["status"] = to_string(r.status);
    j["value"] = complex_json(r.value);
    if constexpr (std::is_same_v<C, ExtendedComplex>)
        j["value_full"] = json::array({to_string(r.value.real()), to_string(r.value.imag())});
    j["rel_err_est"] = number_or_null(r.rel_err_est);
    j["n_used"] = r.n_used;
    j["diagnostics"] = {{"max_partial_sum_mag", number_or_null(r.diagnostics.max_partial_sum_mag)},
                        {"underflow_seen", r.diagnostics.underflow_seen}};
    j["precision"] = scalar_traits<C>::name;
    os << j.dump(2) << '\n';
    return exit_code(r.status);
}

template <class C>
int cmd_trace(const Options& o, std::ostream& os)
{
    const auto params = read_params<C>(o);
    const C z = read_z<C>(o);
    const auto point = make_point(z);
    const auto orders = parse_orders(o.m_text, true);
    const long n_max = o.N.value_or(200);
    if (n_max < 1) throw UsageError("--N must be >= 1");
    const C ref = trace_reference(o, params, z);

    std::vector<std::vector<double>> cols;
    for (std::size_t m : orders) {
        const std::vector<C> seq = accelerated_trace(params, point, m, n_max);
        std::vector<double> col(static_cast<std::size_t>(n_max), std::numeric_limits<double>::quiet_NaN());
        for (std::size_t i = 0; i < seq.size() && i < col.size(); ++i) col[i] = relative_error(seq[i], ref);
        cols.push_back(std::move(col));
    }

    if (o.format == "json") {
        json j;
        j["reference"] = complex_json(ref);
        j["m"] = orders;
        json rows = json::array();
        for (long n = 1; n <= n_max; ++n) {
            json errs = json::array();
            for (const auto& col : cols) errs.push_back(number_or_null(col[static_cast<std::size_t>(n - 1)]));
            rows.push_back({{"n", n}, {"rel_err", errs}});
        }
        j["rows"] = rows;
        os << j.dump(2) << '\n';
        return 0;
    }
    os << "n";
    for (std::size_t m : orders) os << ",m" << m;
    os << '\n';
    for (long n = 1; n <= n_max; ++n) {
        os << n;
        for (const auto& col : cols) os << ',' << csv_number(col[static_cast<std::size_t>(n - 1)]);
        os << '\n';
    }
    return 0;
}

template <class C>
int cmd_coeffs(const Options& o, std::ostream& os)
{
    const auto params = read_params<C>(o);
    const C z = read_z<C>(o);
    const auto point = make_point(z);
    const std::size_t m = single_order(o);
    const AsymptoticExpansion<C> ex =
        point.kind == PointKind::BranchPoint ? coeffs_branch(params, m) : coeffs_offbranch(params, z, m);
    const std::vector<C> r = ratio_taylor_coeffs(params, m).r;

    if (o.format == "csv") {
        os << "k,c_re,c_im,r_re,r_im\n";
        for (std::size_t k = 0; k <= m; ++k) {
            char buf[160];
            const C c = k < ex.c.size() ? ex.c[k] : C(std::numeric_limits<double>::quiet_NaN());
            std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%.17g", k, re_d(c), im_d(c), re_d(r[k]),
                          im_d(r[k]));
            os << buf << '\n';
        }
        return 0;
    }
    json j;
    j["lambda"] = complex_json(ex.lambda);
    j["at_branch"] = ex.at_branch;
    j["m"] = m;
    json c = json::array(), rr = json::array();
    for (const C& v : ex.c) c.push_back(complex_json(v));
    for (const C& v : r) rr.push_back(complex_json(v));
    j["c"] = c;
    j["r"] = rr;
    j["precision"] = scalar_traits<C>::name;
    os << j.dump(2) << '\n';
    return 0;
}

template <class C>
int cmd_compare(const Options& o, std::ostream& os)
{
    const auto params = read_params<C>(o);
    const C z = read_z<C>(o);
    const auto point = make_point(z);
    const std::size_t m = single_order(o);
    const long n_max = o.N.value_or(200);
    if (n_max < 1) throw UsageError("--N must be >= 1");
    const C ref = trace_reference(o, params, z);

    const std::vector<C> primary = accelerated_trace(params, point, m, n_max);
    const auto emeth = e_method_trace(params, point, m, n_max, ref);
    const auto primary_err = [&](long n) {
        const auto i = static_cast<std::size_t>(n - 1);
        return i < primary.size() ? relative_error(primary[i], ref) : std::numeric_limits<double>::quiet_NaN();
    };

    if (o.format == "json") {
        json j;
        j["m"] = m;
        j["reference"] = complex_json(ref);
        json rows = json::array();
        for (const auto& [n, e] : emeth)
            rows.push_back({{"n", n}, {"primary", number_or_null(primary_err(n))}, {"emethod", number_or_null(e)}});
        j["rows"] = rows;
        os << j.dump(2) << '\n';
        return 0;
    }
    os << "n,rel_err_primary,rel_err_emethod\n";
    for (const auto& [n, e] : emeth) os << n << ',' << csv_number(primary_err(n)) << ',' << csv_number(e) << '\n';
    return 0;
}

CampaignSpec campaign_spec(const Options& o)
{
    CampaignSpec spec;
    spec.R = o.R;
    spec.q = o.q;
    spec.count = o.count;
    spec.at_branch = o.branch;
    spec.m = single_order(o);
    spec.epsilon = o.eps;
    spec.N = o.N.value_or(2000);
    spec.seed = o.seed;
    spec.tau = o.tau;
    spec.trunc_variant = parse_variant(o.variant);
    spec.extended = o.precision == "extended";
    spec.validate();
    return spec;
}

json spec_json(const CampaignSpec& s)
{
    return {{"R", s.R},
            {"q", s.q},
            {"count", s.count},
            {"at_branch", s.at_branch},
            {"m", s.m},
            {"epsilon", s.epsilon},
            {"N", s.N},
            {"seed", s.seed},
            {"tau", s.tau},
            {"variant", s.trunc_variant == TruncationVariant::Modified ? "modified" : "plain"},
            {"precision", s.extended ? "extended" : "double"}};
}

json histogram_json(const Histogram& h)
{
    json a = json::array();
    for (std::size_t i = 0; i < h.edges.size(); ++i) a.push_back(json::array({h.edges[i], h.counts[i]}));
    return a;
}

double two_decimals(double v) { return std::round(v * 100.0) / 100.0; }

int cmd_campaign(const Options& o, std::ostream& os)
{
    const CampaignSpec spec = campaign_spec(o);
    const OutcomeTally t = run_campaign(spec);

    if (o.format == "csv") {
        os << "index,status,category,true_rel_err,rel_err_est,n_used\n";
        for (const SampleRecord& r : t.records) {
            const bool cat = r.evaluated && r.referenced && !r.excluded;
            os << r.index << ',' << (r.evaluated ? to_string(r.status) : "Error") << ','
               << (cat ? to_string(r.category) : "None") << ',' << csv_number(r.true_rel_err) << ','
               << csv_number(r.rel_err_est) << ',' << r.n_used << '\n';
        }
        return 0;
    }
    json j;
    j["spec"] = spec_json(spec);
    j["samples"] = t.samples;
    j["classified"] = t.classified();
    json counts, pct;
    for (auto c : {OutcomeCategory::Convergence, OutcomeCategory::FalsePositive, OutcomeCategory::NoConvergence,
                   OutcomeCategory::FalseNegative}) {
        counts[to_string(c)] = t.count(c);
        pct[to_string(c)] = two_decimals(t.percent(c));
    }
    j["counts"] = counts;
    j["percentages"] = pct;
    j["n_max_hits"] = t.n_max_hits;
    j["n_max_percent"] = two_decimals(100.0 * t.n_max_fraction());
    j["unreferenced"] = t.unreferenced;
    j["excluded"] = t.excluded;
    j["failed"] = t.failed;
    j["error_ratio_log10_histogram"] = histogram_json(t.error_ratio);
    j["terms_needed_histogram"] = histogram_json(t.terms_needed);
    os << j.dump(2) << '\n';
    return 0;
}

json timing_json(std::vector<double> ms)
{
    json j;
    j["count"] = ms.size();
    if (ms.empty()) return j;
    std::sort(ms.begin(), ms.end());
    const std::size_t n = ms.size();
    const double median = n % 2 == 1 ? ms[n / 2] : 0.5 * (ms[n / 2 - 1] + ms[n / 2]);
    double mean = 0.0;
    for (double v : ms) mean += v;
    mean /= static_cast<double>(n);
    j["median_ms"] = median;
    j["mean_ms"] = mean;
    if (n >= 2) {
        double var = 0.0;
        for (double v : ms) var += (v - mean) * (v - mean);
        j["stddev_ms"] = std::sqrt(var / static_cast<double>(n - 1));
        j["min_ms"] = ms.front();
        j["max_ms"] = ms.back();
    }
    return j;
}

template <class C>
double time_one(const HypergeometricInput& in, const EngineConfig& cfg, EvalStatus& status)
{
    const auto params = in.params.as<C>();
    const C z = from_machine<C>(in.z);
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = evaluate(params, make_point(z), cfg);
    const auto t1 = std::chrono::steady_clock::now();
    status = r.status;
    return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

int cmd_bench(const Options& o, std::ostream& os)
{
    const CampaignSpec spec = campaign_spec(o);
    std::vector<double> all, conv;
    json statuses = {{"Converged", 0}, {"InsufficientPrecision", 0}, {"MaxIterations", 0}, {"Error", 0}};
    for (long i = 0; i < spec.count; ++i) {
        const HypergeometricInput in = random_case(spec, static_cast<std::uint64_t>(i));
        EvalStatus st{};
        double ms = 0.0;
        try {
            ms = spec.extended ? time_one<ExtendedComplex>(in, spec.engine_config(), st)
                               : time_one<MachineComplex>(in, spec.engine_config(), st);
        } catch (const std::exception&) {
            statuses["Error"] = statuses["Error"].get<long>() + 1;
            continue;
        }
        statuses[to_string(st)] = statuses[to_string(st)].get<long>() + 1;
        all.push_back(ms);
        if (st == EvalStatus::Converged) conv.push_back(ms);
    }
    json j;
    j["spec"] = spec_json(spec);
    j["statuses"] = statuses;
    j["all"] = timing_json(all);
    j["converged"] = timing_json(conv);
    os << j.dump(2) << '\n';
    return 0;
}

void add_common(CLI::App* sub, Options& o, bool series, bool campaign)
{
    if (series) {
        sub->add_option("--upper", o.upper, "upper parameters, comma separated complex literals");
        sub->add_option("--lower", o.lower, "lower parameters, comma separated complex literals");
        sub->add_option("--z", o.z, "argument, |z| <= 1");
        sub->add_option("--reference", o.reference, "known value for error traces");
    }
    if (campaign) {
        sub->add_option("--R", o.R, "parameter scale")->capture_default_str();
        sub->add_option("--q", o.q, "lower parameter count")->capture_default_str();
        sub->add_option("--count", o.count, "number of samples")->capture_default_str();
        sub->add_flag("--branch", o.branch, "sample at z = 1 instead of the unit disk");
        sub->add_option("--seed", o.seed, "generator seed")->capture_default_str();
    }
    sub->add_option("--m", o.m_text, "order (trace: comma separated list, 0 = raw sums)")->capture_default_str();
    sub->add_option("--N", o.N, "iteration cap (trace/compare: number of rows)");
    sub->add_option("--eps", o.eps, "relative tolerance")->capture_default_str();
    sub->add_option("--tau", o.tau, "rounding error factor")->capture_default_str();
    sub->add_option("--precision", o.precision, "double or extended")
        ->check(CLI::IsMember({"double", "extended"}))
        ->capture_default_str();
    sub->add_option("--variant", o.variant, "truncation estimate: modified or plain")
        ->check(CLI::IsMember({"modified", "plain"}))
        ->capture_default_str();
    sub->add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--out", o.out, "output path (default stdout)");
}

template <template <class> class Fn>
int dispatch(const Options& o, std::ostream& os)
{
    if (o.precision == "extended") return Fn<ExtendedComplex>::run(o, os);
    return Fn<MachineComplex>::run(o, os);
}

template <class C>
struct EvalFn {
    static int run(const Options& o, std::ostream& os) { return cmd_eval<C>(o, os); }
};
template <class C>
struct TraceFn {
    static int run(const Options& o, std::ostream& os) { return cmd_trace<C>(o, os); }
};
template <class C>
struct CoeffsFn {
    static int run(const Options& o, std::ostream& os) { return cmd_coeffs<C>(o, os); }
};
template <class C>
struct CompareFn {
    static int run(const Options& o, std::ostream& os) { return cmd_compare<C>(o, os); }
};

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Accelerated evaluation of generalized hypergeometric series"};
    app.require_subcommand(1);
    Options o;
    auto* eval = app.add_subcommand("eval", "evaluate q+1Fq(upper; lower; z)");
    auto* trace = app.add_subcommand("trace", "true relative error per n for several orders");
    auto* coeffs = app.add_subcommand("coeffs", "asymptotic and term-ratio coefficients");
    auto* campaign = app.add_subcommand("campaign", "randomized accuracy campaign");
    auto* compare = app.add_subcommand("compare", "error traces of this method and the E-method");
    auto* bench = app.add_subcommand("bench", "timing over a seeded random campaign");
    add_common(eval, o, true, false);
    add_common(trace, o, true, false);
    add_common(coeffs, o, true, false);
    add_common(compare, o, true, false);
    add_common(campaign, o, false, true);
    add_common(bench, o, false, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    std::ofstream file;
    std::ostringstream buffer;
    try {
        int code = 0;
        if (eval->parsed()) code = dispatch<EvalFn>(o, buffer);
        else if (trace->parsed()) {
            if (o.format.empty()) o.format = "csv";
            code = dispatch<TraceFn>(o, buffer);
        } else if (coeffs->parsed()) code = dispatch<CoeffsFn>(o, buffer);
        else if (compare->parsed()) {
            if (o.format.empty()) o.format = "csv";
            code = dispatch<CompareFn>(o, buffer);
        } else if (campaign->parsed()) code = cmd_campaign(o, buffer);
        else if (bench->parsed()) code = cmd_bench(o, buffer);

        if (o.out.empty()) {
            std::cout << buffer.str();
        } else {
            file.open(o.out);
            if (!file) throw UsageError("cannot open " + o.out);
            file << buffer.str();
        }
        return code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
    }
    return 1;
}
