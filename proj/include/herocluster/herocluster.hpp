// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "herocluster/clustering.hpp"
#include "herocluster/csv.hpp"
#include "herocluster/encoding.hpp"
#include "herocluster/error.hpp"
#include "herocluster/evaluation.hpp"
#include "herocluster/features.hpp"
#include "herocluster/match_data.hpp"
#include "herocluster/matrix.hpp"
#include "herocluster/metrics.hpp"
#include "herocluster/mlp.hpp"
#include "herocluster/opendota.hpp"
#include "herocluster/patch_ingest.hpp"
#include "herocluster/training.hpp"
