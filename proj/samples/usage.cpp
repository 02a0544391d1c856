// Minimal use of the library: one branch-point 2F1 in extended precision,
// the same in binary64, and a binomial series inside the disk.

#include <cstdio>

#include "hypaccel/hypaccel.hpp"

using namespace hypaccel;

int main()
{
    using E = ExtendedComplex;
    using M = MachineComplex;

    // 2F1(1+4i, 1.5+4.5i; 3+i; 1)
    const HypergeometricParams<M> p({{1, 4}, {1.5, 4.5}}, {{3, 1}});
    EngineConfig cfg;
    cfg.m = 30;
    cfg.epsilon = 1e-12;

    const auto ext = evaluate(p.as<E>(), make_point(E(1.0)), cfg);
    std::printf("extended: %s  %s %s  (est %.1e, %ld terms)\n", to_string(ext.status),
                to_string(ext.value.real()).c_str(), to_string(ext.value.imag()).c_str(), ext.rel_err_est,
                ext.n_used);

    const auto dbl = evaluate(p, make_point(M(1.0)), cfg);
    std::printf("binary64: %s  %.16e %.16e  (est %.1e, %ld terms)\n", to_string(dbl.status), dbl.value.real(),
                dbl.value.imag(), dbl.rel_err_est, dbl.n_used);

    // 1F0(2;;0.5) = 4
    const auto bin = evaluate(HypergeometricParams<M>({2}, {}), make_point(M(0.5)), EngineConfig{});
    std::printf("1F0(2;;0.5): %s  %.16g\n", to_string(bin.status), bin.value.real());
    return 0;
}
