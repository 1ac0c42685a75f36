#pragma once

#include "mpoly/errors.hpp"
#include "mpoly/io.hpp"
#include "mpoly/linalg.hpp"
#include "mpoly/multilinear.hpp"
#include "mpoly/norms.hpp"
#include "mpoly/parallel.hpp"
#include "mpoly/polynomial.hpp"
#include "mpoly/rng.hpp"
#include "mpoly/seqclass.hpp"
#include "mpoly/shape.hpp"
#include "mpoly/summing.hpp"
#include "mpoly/symmetry.hpp"
#include "mpoly/verify.hpp"
