#pragma once

// Cyclic phase colormap: 256 RGB entries sampled from matplotlib's "twilight"
// map. Index i covers phase -pi + 2 pi i / 256; phase 0 falls on entry 128.

#include <array>
#include <cstdint>

namespace prtk::io {

inline constexpr std::array<std::array<std::uint8_t, 3>, 256> kPhaseColormap{{
    {226, 217, 226},
    {225, 217, 226},
    {224, 217, 226},
    {222, 217, 225},
    {221, 217, 224},
    {220, 217, 223},
    {218, 216, 223},
    {216, 216, 222},
    {214, 215, 221},
    {212, 214, 220},
    {210, 213, 219},
    {208, 212, 217},
    {205, 211, 216},
    {203, 210, 215},
    {200, 208, 214},
    {197, 207, 213},
    {194, 206, 212},
    {191, 204, 211},
    {188, 203, 209},
    {185, 201, 208},
    {182, 200, 207},
    {179, 198, 206},
    {176, 197, 205},
    {173, 195, 205},
    {170, 194, 204},
    {167, 192, 203},
    {164, 190, 202},
    {161, 189, 201},
    {158, 187, 201},
    {156, 185, 200},
    {153, 184, 200},
    {150, 182, 199},
    {147, 180, 198},
    {145, 178, 198},
    {142, 177, 197},
    {140, 175, 197},
    {137, 173, 197},
    {135, 171, 196},
    {133, 169, 196},
    {130, 167, 195},
    {128, 165, 195},
    {126, 164, 195},
    {124, 162, 194},
    {122, 160, 194},
    {120, 158, 194},
    {118, 156, 193},
    {117, 154, 193},
    {115, 152, 193},
    {113, 150, 193},
    {112, 148, 192},
    {110, 146, 192},
    {109, 144, 192},
    {108, 142, 191},
    {107, 140, 191},
    {105, 138, 191},
    {104, 136, 190},
    {103, 134, 190},
    {102, 132, 189},
    {102, 130, 189},
    {101, 127, 189},
    {100, 125, 188},
    {99, 123, 188},
    {99, 121, 187},
    {98, 119, 187},
    {98, 117, 186},
    {97, 114, 186},
    {97, 112, 185},
    {96, 110, 184},
    {96, 108, 184},
    {96, 105, 183},
    {96, 103, 182},
    {95, 101, 181},
    {95, 98, 180},
    {95, 96, 180},
    {95, 94, 179},
    {95, 91, 178},
    {95, 89, 177},
    {95, 87, 176},
    {94, 84, 174},
    {94, 82, 173},
    {94, 79, 172},
    {94, 77, 171},
    {94, 75, 169},
    {94, 72, 168},
    {94, 70, 166},
    {94, 67, 165},
    {93, 65, 163},
    {93, 62, 161},
    {93, 60, 160},
    {93, 58, 158},
    {92, 55, 156},
    {92, 53, 154},
    {91, 50, 152},
    {91, 48, 149},
    {90, 46, 147},
    {90, 43, 144},
    {89, 41, 142},
    {88, 39, 139},
    {87, 37, 136},
    {87, 35, 133},
    {86, 33, 130},
    {85, 31, 127},
    {83, 30, 124},
    {82, 28, 121},
    {81, 26, 117},
    {79, 25, 114},
    {78, 24, 111},
    {76, 23, 107},
    {75, 22, 104},
    {73, 21, 100},
    {71, 20, 97},
    {70, 20, 94},
    {68, 19, 90},
    {66, 18, 87},
    {65, 18, 84},
    {63, 18, 81},
    {61, 17, 78},
    {60, 17, 75},
    {58, 17, 73},
    {57, 17, 70},
    {55, 17, 68},
    {54, 17, 66},
    {53, 17, 64},
    {52, 17, 62},
    {51, 17, 60},
    {50, 18, 58},
    {49, 19, 57},
    {48, 20, 55},
    {48, 20, 55},
    {49, 19, 55},
    {51, 18, 55},
    {52, 18, 56},
    {53, 17, 56},
    {54, 17, 57},
    {56, 17, 57},
    {58, 17, 58},
    {59, 17, 59},
    {61, 17, 60},
    {63, 18, 61},
    {65, 18, 61},
    {67, 18, 62},
    {70, 18, 64},
    {72, 19, 65},
    {74, 19, 66},
    {77, 20, 67},
    {79, 20, 68},
    {82, 21, 69},
    {84, 21, 70},
    {87, 22, 71},
    {89, 22, 72},
    {92, 23, 73},
    {95, 23, 74},
    {97, 24, 75},
    {100, 25, 75},
    {103, 25, 76},
    {105, 26, 77},
    {108, 27, 78},
    {111, 28, 78},
    {113, 29, 79},
    {116, 30, 79},
    {118, 31, 79},
    {121, 32, 80},
    {123, 33, 80},
    {126, 34, 80},
    {128, 35, 80},
    {131, 37, 80},
    {133, 38, 80},
    {135, 39, 80},
    {138, 41, 80},
    {140, 42, 80},
    {142, 44, 80},
    {144, 46, 80},
    {146, 47, 80},
    {148, 49, 80},
    {150, 51, 80},
    {152, 53, 80},
    {154, 55, 80},
    {156, 57, 80},
    {158, 59, 80},
    {160, 61, 80},
    {161, 63, 80},
    {163, 65, 80},
    {165, 67, 80},
    {166, 69, 80},
    {168, 71, 80},
    {169, 73, 80},
    {171, 75, 80},
    {172, 77, 81},
    {174, 80, 81},
    {175, 82, 81},
    {177, 84, 82},
    {178, 86, 82},
    {179, 89, 83},
    {181, 91, 83},
    {182, 93, 84},
    {183, 95, 85},
    {184, 98, 85},
    {185, 100, 86},
    {186, 102, 87},
    {187, 105, 88},
    {188, 107, 89},
    {189, 110, 90},
    {190, 112, 91},
    {191, 114, 93},
    {192, 117, 94},
    {193, 119, 95},
    {194, 122, 97},
    {194, 124, 99},
    {195, 127, 100},
    {196, 129, 102},
    {197, 132, 104},
    {197, 134, 106},
    {198, 137, 108},
    {198, 139, 110},
    {199, 142, 113},
    {200, 144, 115},
    {200, 146, 117},
    {201, 149, 120},
    {201, 151, 123},
    {202, 154, 125},
    {202, 156, 128},
    {203, 159, 131},
    {204, 161, 134},
    {204, 163, 137},
    {205, 166, 140},
    {205, 168, 143},
    {206, 171, 146},
    {207, 173, 150},
    {207, 175, 153},
    {208, 178, 156},
    {209, 180, 160},
    {209, 182, 163},
    {210, 184, 167},
    {211, 186, 170},
    {212, 189, 173},
    {213, 191, 177},
    {214, 193, 180},
    {215, 195, 184},
    {216, 197, 187},
    {216, 199, 190},
    {217, 201, 194},
    {218, 203, 197},
    {219, 204, 200},
    {220, 206, 203},
    {221, 208, 206},
    {221, 209, 209},
    {222, 211, 211},
    {223, 212, 214},
    {223, 213, 216},
    {224, 214, 218},
    {224, 215, 219},
    {225, 216, 221},
    {225, 216, 223},
    {226, 217, 224},
    {226, 217, 225},
    {226, 217, 226},
}};

}  // namespace prtk::io
