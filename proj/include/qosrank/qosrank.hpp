#pragma once

// QoS-driven classification and ranking of functionally similar web
// services: dataset handling, split criteria, tree and rule learners,
// cross-validation metrics, and the precomputed model cube.

#include "qosrank/dataset.hpp"
#include "qosrank/distribution.hpp"
#include "qosrank/error.hpp"
#include "qosrank/evaluation.hpp"
#include "qosrank/learner.hpp"
#include "qosrank/model_base.hpp"
#include "qosrank/model_cube.hpp"
#include "qosrank/random.hpp"
#include "qosrank/rule_learners.hpp"
#include "qosrank/rule_model.hpp"
#include "qosrank/split_criteria.hpp"
#include "qosrank/synth.hpp"
#include "qosrank/tree_learners.hpp"
#include "qosrank/tree_model.hpp"
