#pragma once

// Umbrella header: norms in calcular algebras via Agler-decomposition SDPs,
// generic matrix tuples, and multiplier model tuples, plus transfer-function
// realizations built from decomposition certificates.

#include "calcular/agler.hpp"
#include "calcular/domain.hpp"
#include "calcular/eig.hpp"
#include "calcular/errors.hpp"
#include "calcular/function.hpp"
#include "calcular/kernel.hpp"
#include "calcular/lu.hpp"
#include "calcular/matrix.hpp"
#include "calcular/oracle.hpp"
#include "calcular/parallel.hpp"
#include "calcular/realization.hpp"
#include "calcular/rng.hpp"
#include "calcular/schur.hpp"
#include "calcular/sdp.hpp"
#include "calcular/tuple.hpp"
