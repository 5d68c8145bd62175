#pragma once

#include "semimarkov/version.hpp"
#include "semimarkov/numeric.hpp"
#include "semimarkov/matrix.hpp"
#include "semimarkov/rng.hpp"
#include "semimarkov/model.hpp"
#include "semimarkov/likelihood.hpp"
#include "semimarkov/decode.hpp"
#include "semimarkov/simulate.hpp"
#include "semimarkov/optimize.hpp"
#include "semimarkov/fit.hpp"
#include "semimarkov/parallel.hpp"
#include "semimarkov/features.hpp"
#include "semimarkov/evaluate.hpp"
#include "semimarkov/io.hpp"
