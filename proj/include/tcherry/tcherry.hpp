#pragma once

#include "tcherry/data_io.hpp"
#include "tcherry/discrete_dist.hpp"
#include "tcherry/error.hpp"
#include "tcherry/index_set.hpp"
#include "tcherry/junction_tree.hpp"
#include "tcherry/learner.hpp"
#include "tcherry/scoring.hpp"
#include "tcherry/serialization.hpp"
#include "tcherry/synthetic.hpp"
