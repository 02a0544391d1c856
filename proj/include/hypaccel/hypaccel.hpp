#pragma once

#include "hypaccel/double_double.hpp"
#include "hypaccel/errors.hpp"
#include "hypaccel/scalar.hpp"
#include "hypaccel/termratio.hpp"
#include "hypaccel/asymptotics.hpp"
#include "hypaccel/engine.hpp"
#include "hypaccel/oracle.hpp"
#include "hypaccel/emethod.hpp"
