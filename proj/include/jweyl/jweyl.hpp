#pragma once

// Core library. The YAML/JSON/CSV readers (model_io.hpp, measure_io.hpp) are not
// included here: they need yaml-cpp, i.e. link jweyl::io instead of jweyl::jweyl.

#include "jweyl/coefficients.hpp"
#include "jweyl/debranges.hpp"
#include "jweyl/errors.hpp"
#include "jweyl/inverse.hpp"
#include "jweyl/krein.hpp"
#include "jweyl/lattice.hpp"
#include "jweyl/polynomial.hpp"
#include "jweyl/quadrature.hpp"
#include "jweyl/spectra.hpp"
#include "jweyl/transform.hpp"
#include "jweyl/weyl.hpp"
