#pragma once

#include "bvh.hpp"
#include "classifiers/model.hpp"
#include "config.hpp"
#include "evaluation.hpp"
#include "feature_table.hpp"
#include "features.hpp"
#include "manifest.hpp"
#include "pipeline.hpp"
#include "report.hpp"
#include "sequence.hpp"
#include "spectral.hpp"
#include "synth.hpp"
