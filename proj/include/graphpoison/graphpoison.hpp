#pragma once

#include "graphpoison/attack.hpp"
#include "graphpoison/baselines.hpp"
#include "graphpoison/common.hpp"
#include "graphpoison/embedding.hpp"
#include "graphpoison/eval.hpp"
#include "graphpoison/graph.hpp"
#include "graphpoison/proximity.hpp"
#include "graphpoison/sbm.hpp"
#include "graphpoison/split.hpp"
