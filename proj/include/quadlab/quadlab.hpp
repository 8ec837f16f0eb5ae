#pragma once

// Umbrella header: the whole laboratory. Individual headers stay includable on
// their own; this exists for the CLI and for quick experiments.

#include "quadlab/char_fn.hpp"
#include "quadlab/discriminant.hpp"
#include "quadlab/distribution.hpp"
#include "quadlab/errors.hpp"
#include "quadlab/format.hpp"
#include "quadlab/kronecker.hpp"
#include "quadlab/logderiv.hpp"
#include "quadlab/parallel.hpp"
#include "quadlab/philox.hpp"
#include "quadlab/primes.hpp"
#include "quadlab/random_model.hpp"
#include "quadlab/reports.hpp"
#include "quadlab/summation.hpp"
#include "quadlab/von_mangoldt.hpp"
