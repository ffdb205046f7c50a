#pragma once

// Convenience umbrella for the whole library.

#include "bdris/channel.hpp"
#include "bdris/projections.hpp"
#include "bdris/passive.hpp"
#include "bdris/active.hpp"
#include "bdris/evaluation.hpp"
#include "bdris/cli.hpp"
