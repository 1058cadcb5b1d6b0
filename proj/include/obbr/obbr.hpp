#pragma once

// Umbrella header.

#include "obbr/attack.hpp"
#include "obbr/client.hpp"
#include "obbr/config.hpp"
#include "obbr/dataset.hpp"
#include "obbr/evaluator.hpp"
#include "obbr/http.hpp"
#include "obbr/mock_clients.hpp"
#include "obbr/prompts.hpp"
#include "obbr/report.hpp"
#include "obbr/retrieval.hpp"
#include "obbr/rewriter.hpp"
#include "obbr/theory.hpp"
