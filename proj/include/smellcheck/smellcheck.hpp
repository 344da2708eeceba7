#pragma once

#include "smellcheck/agreement.hpp"
#include "smellcheck/catalog.hpp"
#include "smellcheck/codebook.hpp"
#include "smellcheck/detector.hpp"
#include "smellcheck/error.hpp"
#include "smellcheck/metrics.hpp"
#include "smellcheck/model_io.hpp"
#include "smellcheck/review_session.hpp"
#include "smellcheck/smell_kind.hpp"
#include "smellcheck/source_model.hpp"
#include "smellcheck/workspace.hpp"
