#pragma once

#include "ordembed/calibration.hpp"
#include "ordembed/common.hpp"
#include "ordembed/comparisons.hpp"
#include "ordembed/domain.hpp"
#include "ordembed/embedders.hpp"
#include "ordembed/embedding.hpp"
#include "ordembed/experiment.hpp"
#include "ordembed/io.hpp"
#include "ordembed/lemmas.hpp"
#include "ordembed/metrics.hpp"
#include "ordembed/similarity.hpp"
#include "ordembed/simplex.hpp"
#include "ordembed/trilateration.hpp"
