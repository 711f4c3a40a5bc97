#pragma once

#include <cstdint>
#include <string>

#include "ddmapd/instance.hpp"

namespace ddmapd {

enum class LayoutKind { R2R, S2W, DnE };

LayoutKind parse_layout_kind(const std::string& s);
std::string layout_kind_name(LayoutKind k);

struct LayoutSpec {
    LayoutKind kind = LayoutKind::R2R;
    int width = 24;
    int height = 24;
    double density = 0.2;  // shelves / free cells
    int agents = 8;
    uint64_t seed = 0;
    // DnE only: fraction of shelves that stay at their delivery cell.
    double stationary_fraction = 0.4;
};

// Deterministic generator for the three layout families. R2R scatters
// pickups uniformly with about half the shelves rearranged to a random
// disjoint delivery set; S2W fills a staging strip and delivers into aisle
// storage columns; DnE delivers into storage with half the pickups inside
// the zones and half scattered. Regenerates until check_well_formed passes.
Instance generate_instance(const LayoutSpec& spec);

}  // namespace ddmapd
