#pragma once

#include "sandpile/error.hpp"
#include "sandpile/graph.hpp"
#include "sandpile/engine.hpp"
#include "sandpile/thick_tree.hpp"
#include "sandpile/io.hpp"
#include "sandpile/generate.hpp"
#include "sandpile/check.hpp"
