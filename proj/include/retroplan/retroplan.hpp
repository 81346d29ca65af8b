#pragma once
// Convenience umbrella: pulls in the whole library.

#include "retroplan/csv.hpp"
#include "retroplan/domain.hpp"
#include "retroplan/errors.hpp"
#include "retroplan/finance.hpp"
#include "retroplan/ingest.hpp"
#include "retroplan/milp.hpp"
#include "retroplan/model.hpp"
#include "retroplan/mps.hpp"
#include "retroplan/runner.hpp"
#include "retroplan/simplex.hpp"
#include "retroplan/tsreduce.hpp"
#include "retroplan/verify.hpp"
