// Copyright 2026 The Cotrain Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Minimal static SVG line charts.

#ifndef COTRAIN_PLOT_H_
#define COTRAIN_PLOT_H_

#include <filesystem>
#include <string>
#include <vector>

namespace cotrain {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct LineChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
};

std::string RenderSvg(const LineChart& chart);
void WriteSvg(const LineChart& chart, const std::filesystem::path& path);

}  // namespace cotrain

#endif  // COTRAIN_PLOT_H_
