#include <catch2/catch_amalgamated.hpp>

#include "maopac/harness.hpp"

TEST_CASE("placeholder") { CHECK(true); }
