#pragma once

// Minimal deterministic SVG line plots.  Output depends only on the data
// passed in: no timestamps, no external fonts, fixed palette, fixed number
// formatting.  Identical inputs therefore yield byte-identical files, which
// keeps rendered figures inside the reproducibility contract.

#include <string>
#include <vector>

namespace aci::svg {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct Panel {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  // Flip the horizontal axis so values grow to the left.  Used for backward
  // influence profiles, which are naturally read as "lag before now".
  bool reverse_x = false;
  // Flip the vertical axis so values grow downward: the reverse-axis
  // convention for backward influence ranges (extent into the past hangs
  // below the time axis).
  bool reverse_y = false;
  // Force the vertical range to include zero (profiles are nonnegative and
  // read best against a zero baseline).
  bool include_zero = false;
};

// Render a column of panels that share the figure width.  Panels with no
// finite data still get axes and a title; a series with a single finite
// point is drawn as a marker instead of a line.
std::string render(const std::vector<Panel>& panels, int width = 960,
                   int panel_height = 230);

// Render and write to `path`, creating parent directories as needed.
void write(const std::string& path, const std::vector<Panel>& panels,
           int width = 960, int panel_height = 230);

}  // namespace aci::svg
