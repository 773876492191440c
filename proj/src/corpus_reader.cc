// Copyright 2026 The vocab-graft Authors
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

#include "vocab_graft/corpus_reader.h"

#include "json.hpp"

#include "vocab_graft/errors.h"

namespace vocab_graft {

RecordReader::RecordReader(std::istream& in) : in_(in) {
  const auto first = in_.peek();
  json_lines_ = first == '{';
}

bool RecordReader::Next(std::string* record) {
  std::string line;
  while (true) {
    if (!std::getline(in_, line)) {
      if (in_.bad()) {
        throw IoError("read failure at record " + std::to_string(records_read_));
      }
      return false;
    }
    ++line_no_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!json_lines_) break;
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    break;
  }

  if (!json_lines_) {
    *record = std::move(line);
    ++records_read_;
    return true;
  }
  const nlohmann::json doc = nlohmann::json::parse(line, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw FormatError("record " + std::to_string(records_read_) + " (line " +
                      std::to_string(line_no_) + "): not a JSON object");
  }
  const auto it = doc.find("text");
  if (it == doc.end() || !it->is_string()) {
    throw FormatError("record " + std::to_string(records_read_) + " (line " +
                      std::to_string(line_no_) + "): missing string field \"text\"");
  }
  *record = it->get<std::string>();
  ++records_read_;
  return true;
}

size_t RecordReader::NextBatch(std::vector<std::string>* batch, size_t max_records) {
  batch->clear();
  std::string record;
  while (batch->size() < max_records && Next(&record)) batch->push_back(std::move(record));
  return batch->size();
}

}  // namespace vocab_graft
