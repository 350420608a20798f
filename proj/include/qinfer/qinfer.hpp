#pragma once

// Umbrella header: generalized inference over finite discrete distributions,
// where the reverse conditional comes from a configurable inference rule
// rather than exclusively from the classical one.

#include "qinfer/dist.hpp"
#include "qinfer/errors.hpp"
#include "qinfer/format.hpp"
#include "qinfer/inference.hpp"
#include "qinfer/io.hpp"
#include "qinfer/oracle.hpp"
#include "qinfer/rules.hpp"
#include "qinfer/seqprob.hpp"
#include "qinfer/types.hpp"
