// Copyright 2026 The scengen Authors.
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

// Builds the replay transcript for the bundled reports from scripted model
// answers, so offline runs see exactly the prompts the pipeline produces.
//
//   make_fixtures <data dir> [<transcript out>]
//
// For every reports/<name>.txt, responses/<name>.extract.<n>.txt are served
// in order to the extraction loop and, if it succeeds,
// responses/<name>.convert.<n>.txt to the conversion loop.

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <vector>

#include "scengen/error.hpp"
#include "scengen/llm.hpp"
#include "scengen/pipeline.hpp"

namespace fs = std::filesystem;
using namespace scengen;

namespace {

std::vector<std::string> responses(const fs::path& dir, const std::string& name, const std::string& stage) {
  std::vector<std::string> out;
  for (int n = 1;; ++n) {
    const fs::path p = dir / (name + "." + stage + "." + std::to_string(n) + ".txt");
    if (!fs::exists(p)) break;
    out.push_back(read_text_file(p.string()));
  }
  return out;
}

void merge(Transcript& into, const Transcript& from) {
  for (const auto& [digest, entry] : from.entries()) into.put(digest, entry);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: make_fixtures <data dir> [<transcript out>]\n";
    return 2;
  }
  const fs::path data(argv[1]);
  const std::string out = argc > 2 ? argv[2] : (data / "transcripts" / "replay.json").string();
  const std::string model = LlmClientConfig{}.model_name;

  std::vector<fs::path> reports;
  for (const auto& e : fs::directory_iterator(data / "reports")) {
    if (e.path().extension() == ".txt") reports.push_back(e.path());
  }
  std::sort(reports.begin(), reports.end());

  Transcript all;
  try {
    for (const auto& report : reports) {
      const std::string name = report.stem().string();
      ScriptedClient extract_answers(responses(data / "responses", name, "extract"));
      RecordingClient extract_rec(extract_answers, model);
      std::optional<Ips> ips;
      try {
        ips = extract_ips(read_text_file(report.string()), extract_rec).ips;
      } catch (const ExtractionFailed& e) {
        std::cout << name << ": extraction fails as scripted (" << e.attempts() << " attempts)\n";
      }
      merge(all, extract_rec.transcript());
      if (!ips) continue;

      auto convert = responses(data / "responses", name, "convert");
      if (convert.empty()) continue;
      ScriptedClient convert_answers(std::move(convert));
      RecordingClient convert_rec(convert_answers, model);
      const auto conv = convert_to_template(*ips, convert_rec);
      merge(all, convert_rec.transcript());
      std::cout << name << ": " << extract_answers.calls() << " extraction and " << conv.attempts
                << " conversion attempt(s)\n";
    }
    all.save(out);
  } catch (const std::exception& e) {
    std::cerr << "make_fixtures: " << e.what() << "\n";
    return 1;
  }
  std::cout << "wrote " << all.size() << " exchanges to " << out << "\n";
  return 0;
}
