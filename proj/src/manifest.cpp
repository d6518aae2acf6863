#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "sqbench/experiment.hpp"

namespace sqbench {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream stream(line);
  while (std::getline(stream, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

const std::vector<std::string> kColumns = {
    "sample_id", "path",    "language", "gender", "speaker_id",
    "age",       "start_s", "end_s",    "role"};

}  // namespace

CorpusManifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("load_manifest: cannot open " + path);
  const std::filesystem::path base = std::filesystem::path(path).parent_path();

  std::string line;
  if (!std::getline(in, line)) throw Error("load_manifest: empty file " + path);
  if (split_csv_line(line) != kColumns)
    throw Error("load_manifest: bad header in " + path +
                " (expected sample_id,path,language,gender,speaker_id,age,"
                "start_s,end_s,role)");

  CorpusManifest manifest;
  std::set<std::string> seen_ids;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != kColumns.size())
      throw Error("load_manifest: line " + std::to_string(line_no) + " has " +
                  std::to_string(fields.size()) + " fields, expected 9");
    SampleMeta meta;
    meta.sample_id = fields[0];
    meta.path = fields[1];
    meta.language = fields[2];
    meta.gender = fields[3];
    meta.speaker_id = fields[4];
    meta.role = fields[8];
    try {
      meta.age = fields[5].empty() ? 0 : std::stoi(fields[5]);
      meta.start_s = fields[6].empty() ? 0.0 : std::stod(fields[6]);
      meta.end_s = fields[7].empty() ? 0.0 : std::stod(fields[7]);
    } catch (const std::exception&) {
      throw Error("load_manifest: line " + std::to_string(line_no) +
                  ": bad numeric field");
    }
    if (meta.sample_id.empty())
      throw Error("load_manifest: line " + std::to_string(line_no) +
                  ": empty sample_id");
    if (!seen_ids.insert(meta.sample_id).second)
      throw Error("load_manifest: duplicate sample_id " + meta.sample_id);
    if (meta.role != "test" && meta.role != "babble_pool")
      throw Error("load_manifest: line " + std::to_string(line_no) +
                  ": role must be test or babble_pool, got " + meta.role);
    if (meta.gender != "male" && meta.gender != "female")
      throw Error("load_manifest: line " + std::to_string(line_no) +
                  ": gender must be male or female, got " + meta.gender);

    std::filesystem::path audio(meta.path);
    if (audio.is_relative()) audio = base / audio;
    if (!std::filesystem::exists(audio))
      throw Error("load_manifest: missing audio file " + audio.string() +
                  " (sample " + meta.sample_id + ")");
    meta.path = audio.string();

    if (meta.end_s > meta.start_s) {
      const double dur = meta.end_s - meta.start_s;
      if (dur < 5.0 || dur > 10.0)
        std::cerr << "warning: sample " << meta.sample_id << " excerpt is "
                  << dur << " s, outside 5-10 s\n";
    }
    (meta.role == "test" ? manifest.test_samples : manifest.babble_pool)
        .push_back(std::move(meta));
  }
  if (manifest.test_samples.empty())
    throw Error("load_manifest: no test samples in " + path);
  return manifest;
}

}  // namespace sqbench
