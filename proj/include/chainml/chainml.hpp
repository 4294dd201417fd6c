#pragma once

#include "chainml/bounty.hpp"
#include "chainml/centroid.hpp"
#include "chainml/data_handler.hpp"
#include "chainml/dataset.hpp"
#include "chainml/drt.hpp"
#include "chainml/errors.hpp"
#include "chainml/feature_vector.hpp"
#include "chainml/fixed_point.hpp"
#include "chainml/ledger.hpp"
#include "chainml/model.hpp"
#include "chainml/perceptron.hpp"
#include "chainml/points.hpp"
#include "chainml/rng.hpp"
#include "chainml/scenario.hpp"
#include "chainml/sha256.hpp"
#include "chainml/simulation.hpp"
