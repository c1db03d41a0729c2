#pragma once

// Umbrella header for the whole library.

#include "matbump/cli.hpp"
#include "matbump/constants.hpp"
#include "matbump/dyadic.hpp"
#include "matbump/linalg.hpp"
#include "matbump/operators.hpp"
#include "matbump/parallel.hpp"
#include "matbump/random.hpp"
#include "matbump/reducing.hpp"
#include "matbump/serialize.hpp"
#include "matbump/suites.hpp"
#include "matbump/svg.hpp"
#include "matbump/verify.hpp"
#include "matbump/weights.hpp"
#include "matbump/young.hpp"
