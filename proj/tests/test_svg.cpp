#include <doctest.h>

#include <string>

#include "panelsom/svg.hpp"

using namespace panelsom;

namespace {

CodeBook small_map() {
    CodeBook cb;
    cb.topology = Topology::grid(2, 3);
    cb.dim = 2;
    cb.weights = {0, 1, 1, 0, 2, 2, 3, 1, 0, 0, 1, 3};
    return cb;
}

std::size_t count_of(const std::string& hay, const std::string& needle) {
    std::size_t n = 0;
    for (std::size_t p = hay.find(needle); p != std::string::npos; p = hay.find(needle, p + 1)) ++n;
    return n;
}

bool well_formed(const std::string& s) {
    return s.rfind("<?xml", 0) == 0 && s.find("<svg ") != std::string::npos &&
           count_of(s, "<text") == count_of(s, "</text>") && count_of(s, "</svg>") == 1;
}

} // namespace

TEST_CASE("profile_grid emits one panel per unit and is deterministic") {
    const auto cb = small_map();
    const auto s = svg::profile_grid(cb, {"a", "b"});
    CHECK(well_formed(s));
    CHECK(count_of(s, "<rect") == 6);
    CHECK(count_of(s, "<polyline") == 6);
    CHECK(s == svg::profile_grid(cb, {"a", "b"}));
}

TEST_CASE("partition_grid labels every unit with its super-class") {
    const auto cb = small_map();
    const std::vector<int> unit_to_super{1, 1, 2, 2, 3, 3};
    const auto color = svg::partition_grid(cb.topology, unit_to_super, 3, false);
    const auto gray = svg::partition_grid(cb.topology, unit_to_super, 3, true);
    CHECK(well_formed(color));
    CHECK(count_of(color, "<rect") == 6);
    CHECK(color != gray);
    // grayscale output only uses gray fills
    CHECK(gray.find(svg::palette()[0]) == std::string::npos);
    // distinct classes get distinct gray tones
    CHECK(svg::gray_tone(0, 3) != svg::gray_tone(1, 3));
    CHECK(svg::gray_tone(0, 3) != svg::gray_tone(2, 3));
}

TEST_CASE("trajectory_overlay draws arrows for moves and none for stays") {
    const auto cb = small_map();
    const std::vector<int> years{1984, 1985, 1986, 1987};
    const auto moving = svg::trajectory_overlay(cb.topology, {1, 2, 2, 5}, years);
    CHECK(well_formed(moving));
    CHECK(count_of(moving, "<line") == 2);  // 1->2 and 2->5; the stay draws nothing
    const auto constant = svg::trajectory_overlay(cb.topology, {4, 4, 4, 4}, years);
    CHECK(count_of(constant, "marker-end") == 0);
    CHECK(count_of(constant, "<circle") == 1);
}

TEST_CASE("size_bars renders one bar per class with its count") {
    const auto s = svg::size_bars({"A", "B", "C"}, {851, 2936, 1495});
    CHECK(well_formed(s));
    CHECK(count_of(s, "<rect") == 3);
    CHECK(s.find("2936") != std::string::npos);
    CHECK(s == svg::size_bars({"A", "B", "C"}, {851, 2936, 1495}));
}

TEST_CASE("scatter places every named point") {
    const auto s = svg::scatter({"p", "q"}, {{{0.5, 0.5}}, {{-0.3, 0.8}}}, "axes 1 x 2");
    CHECK(well_formed(s));
    CHECK(s.find(">p</text>") != std::string::npos);
    CHECK(s.find(">q</text>") != std::string::npos);
    CHECK(s.find("axes 1 x 2") != std::string::npos);
    // unit circle guide is present
    CHECK(count_of(s, "<circle") >= 3);
}

TEST_CASE("numeric formatting is fixed to two decimals") {
    CHECK(svg::num(1.0) == "1.00");
    CHECK(svg::num(-0.125) == "-0.12");
    CHECK(svg::num(3.14159) == "3.14");
}
