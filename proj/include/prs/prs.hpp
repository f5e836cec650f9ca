#pragma once

#include "prs/base_features.hpp"
#include "prs/classifiers.hpp"
#include "prs/dataset_io.hpp"
#include "prs/eval_harness.hpp"
#include "prs/feature_prep.hpp"
#include "prs/pipeline.hpp"
#include "prs/report_io.hpp"
#include "prs/root_growth.hpp"
#include "prs/soil.hpp"
#include "prs/spectral.hpp"
#include "prs/stats.hpp"
