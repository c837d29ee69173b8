#pragma once

// Everything in one include.

#include "depwatch/action.hpp"
#include "depwatch/activity.hpp"
#include "depwatch/canonical_json.hpp"
#include "depwatch/clustering.hpp"
#include "depwatch/confusion.hpp"
#include "depwatch/dataset.hpp"
#include "depwatch/date.hpp"
#include "depwatch/effort.hpp"
#include "depwatch/error.hpp"
#include "depwatch/evaluate.hpp"
#include "depwatch/features.hpp"
#include "depwatch/forecast.hpp"
#include "depwatch/forest.hpp"
#include "depwatch/graph.hpp"
#include "depwatch/labeling.hpp"
#include "depwatch/labels.hpp"
#include "depwatch/library_id.hpp"
#include "depwatch/live_provider.hpp"
#include "depwatch/matrix.hpp"
#include "depwatch/pca.hpp"
#include "depwatch/propagate.hpp"
#include "depwatch/provider.hpp"
#include "depwatch/render.hpp"
#include "depwatch/repo_ref.hpp"
#include "depwatch/rng.hpp"
#include "depwatch/scan.hpp"
#include "depwatch/snapshot.hpp"
#include "depwatch/synth.hpp"
