#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace segrefine {

inline std::vector<std::string> bridge_component_names() {
  return {"Non-Bridge", "Columns", "Beams & Slabs", "Other structural", "Other nonstructural"};
}

inline std::vector<std::string> scene_class_names() {
  return {"Building", "Greenery", "Person", "Pavement", "Sign & Poles",
          "Vehicles", "Bridges",  "Water",  "Sky",      "Others"};
}

/// Bridge names for five classes, "class0".."classN" otherwise.
inline std::vector<std::string> default_class_names(std::size_t n_classes) {
  if (n_classes == 5) return bridge_component_names();
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n_classes; ++i) names.push_back("class" + std::to_string(i));
  return names;
}

}  // namespace segrefine
