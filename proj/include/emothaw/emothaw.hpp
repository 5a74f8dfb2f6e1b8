#pragma once

#include "emothaw/corpus.hpp"
#include "emothaw/dass.hpp"
#include "emothaw/error.hpp"
#include "emothaw/evaluation.hpp"
#include "emothaw/features.hpp"
#include "emothaw/random_forest.hpp"
#include "emothaw/rank.hpp"
#include "emothaw/svc.hpp"
#include "emothaw/synth.hpp"
#include "emothaw/task.hpp"
