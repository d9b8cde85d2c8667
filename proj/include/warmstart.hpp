#pragma once

#include "warmstart/baselines.hpp"
#include "warmstart/errors.hpp"
#include "warmstart/kmedians.hpp"
#include "warmstart/ledger.hpp"
#include "warmstart/metric.hpp"
#include "warmstart/min_cost_flow.hpp"
#include "warmstart/oracle.hpp"
#include "warmstart/partition.hpp"
#include "warmstart/rng.hpp"
#include "warmstart/scenario.hpp"
#include "warmstart/strategies.hpp"
#include "warmstart/trajectory.hpp"
