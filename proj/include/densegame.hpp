#pragma once

#include "densegame/agents.hpp"
#include "densegame/analysis.hpp"
#include "densegame/assessment.hpp"
#include "densegame/catalog.hpp"
#include "densegame/content.hpp"
#include "densegame/error.hpp"
#include "densegame/game.hpp"
#include "densegame/io.hpp"
#include "densegame/physics.hpp"
#include "densegame/protocol.hpp"
#include "densegame/records.hpp"
#include "densegame/rng.hpp"
#include "densegame/stage.hpp"
#include "densegame/telemetry.hpp"
