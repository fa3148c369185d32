// Copyright 2026 The nliprobe Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Reads CLI11 configuration from a JSON document. Top-level keys are global
// flags; a nested object named after a subcommand holds that subcommand's
// flags, e.g. {"workers": 4, "evaluate": {"tau": [0.5, 0.7], "top-k": 3}}.

#ifndef NLIPROBE_TOOLS_JSON_CONFIG_H_
#define NLIPROBE_TOOLS_JSON_CONFIG_H_

#include <istream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

namespace nliprobe::tools {

class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App* app, bool default_also, bool,
                        std::string) const override {
    nlohmann::json j = nlohmann::json::object();
    Dump(app, default_also, j);
    return j.dump(2) + "\n";
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    nlohmann::json j;
    try {
      input >> j;
    } catch (const nlohmann::json::exception& e) {
      throw CLI::ConversionError(std::string("config file is not valid JSON: ") +
                                 e.what());
    }
    if (!j.is_object()) {
      throw CLI::ConversionError("config file must hold a JSON object");
    }
    std::vector<CLI::ConfigItem> items;
    Flatten(j, {}, items);
    return items;
  }

 private:
  static std::string Scalar(const nlohmann::json& v, const std::string& key) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number()) return v.dump();
    throw CLI::ConversionError("config key '" + key + "' must hold a scalar or list");
  }

  static void Flatten(const nlohmann::json& j,
                      const std::vector<std::string>& parents,
                      std::vector<CLI::ConfigItem>& items) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (it->is_object()) {
        std::vector<std::string> nested = parents;
        nested.push_back(it.key());
        Flatten(*it, nested, items);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = it.key();
      if (it->is_array()) {
        for (const auto& v : *it) item.inputs.push_back(Scalar(v, it.key()));
      } else {
        item.inputs.push_back(Scalar(*it, it.key()));
      }
      items.push_back(std::move(item));
    }
  }

  static void Dump(const CLI::App* app, bool default_also, nlohmann::json& out) {
    for (const CLI::Option* opt : app->get_options()) {
      if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
      const std::string name = opt->get_lnames().front();
      if (opt->count() > 0) {
        const auto& results = opt->results();
        if (results.size() == 1) {
          out[name] = results.front();
        } else {
          out[name] = results;
        }
      } else if (default_also && !opt->get_default_str().empty()) {
        out[name] = opt->get_default_str();
      }
    }
    for (const CLI::App* sub : app->get_subcommands({})) {
      if (sub->get_name().empty()) continue;
      nlohmann::json nested = nlohmann::json::object();
      Dump(sub, default_also, nested);
      if (!nested.empty()) out[sub->get_name()] = nested;
    }
  }
};

}  // namespace nliprobe::tools

#endif  // NLIPROBE_TOOLS_JSON_CONFIG_H_
