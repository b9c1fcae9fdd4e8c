#pragma once

#include "sheeppain/checkpoint.hpp"
#include "sheeppain/config.hpp"
#include "sheeppain/error.hpp"
#include "sheeppain/gnn.hpp"
#include "sheeppain/graph.hpp"
#include "sheeppain/ingestion.hpp"
#include "sheeppain/model.hpp"
#include "sheeppain/scoring.hpp"
#include "sheeppain/synth.hpp"
#include "sheeppain/training.hpp"
#include "sheeppain/types.hpp"
#include "sheeppain/verification.hpp"
