#include "bqrobust/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <unordered_set>

#include "bqrobust/errors.hpp"
#include "bqrobust/textprep.hpp"
#include <json.hpp>

namespace bqrobust::io {

namespace {

using nlohmann::json;

static_assert(std::endian::native == std::endian::little,
              "binary formats are little-endian; big-endian hosts need byte swapping");

json parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ParseError("cannot open " + path);
  }
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": " + e.what() + " (byte " + std::to_string(e.byte) + ")");
  }
}

void dump_file(const std::string& path, const json& j) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error("cannot write " + path);
  }
  out << j.dump(2) << '\n';
}

const json& require(const json& j, const char* key, const std::string& path) {
  auto it = j.find(key);
  if (it == j.end()) {
    throw ParseError(path + ": missing key \"" + key + "\"");
  }
  return *it;
}

std::string trimmed(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\n\r\f\v");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\n\r\f\v");
  return s.substr(begin, end - begin + 1);
}

// Shortest decimal form that round-trips, for CSV cells.
std::string format_double(double v) {
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

class BinaryReader {
 public:
  BinaryReader(const std::string& path) : path_(path), in_(path, std::ios::binary) {
    if (!in_) {
      throw ParseError("cannot open " + path);
    }
  }

  void expect_magic(const char* magic) {
    std::array<char, 8> buf{};
    const std::size_t len = std::strlen(magic);
    in_.read(buf.data(), static_cast<std::streamsize>(len));
    if (in_.gcount() != static_cast<std::streamsize>(len) ||
        std::memcmp(buf.data(), magic, len) != 0) {
      throw BadMagic(path_ + ": expected magic \"" + magic + "\"");
    }
  }

  std::uint32_t read_u32() {
    std::uint32_t v = 0;
    read_raw(&v, sizeof v);
    return v;
  }

  std::uint16_t read_u16() {
    std::uint16_t v = 0;
    read_raw(&v, sizeof v);
    return v;
  }

  void read_f32(float* dst, std::size_t count) { read_raw(dst, count * sizeof(float)); }

  std::string read_string(std::size_t len) {
    std::string s(len, '\0');
    read_raw(s.data(), len);
    return s;
  }

 private:
  void read_raw(void* dst, std::size_t bytes) {
    in_.read(static_cast<char*>(dst), static_cast<std::streamsize>(bytes));
    if (in_.gcount() != static_cast<std::streamsize>(bytes)) {
      throw ParseError(path_ + ": short read, file truncated");
    }
  }

  std::string path_;
  std::ifstream in_;
};

class BinaryWriter {
 public:
  BinaryWriter(const std::string& path) : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) {
      throw Error("cannot write " + path);
    }
  }

  void write_magic(const char* magic) { out_.write(magic, static_cast<std::streamsize>(std::strlen(magic))); }
  void write_u32(std::uint32_t v) { out_.write(reinterpret_cast<const char*>(&v), sizeof v); }
  void write_u16(std::uint16_t v) { out_.write(reinterpret_cast<const char*>(&v), sizeof v); }
  void write_f32(const float* src, std::size_t count) {
    out_.write(reinterpret_cast<const char*>(src), static_cast<std::streamsize>(count * sizeof(float)));
  }
  void write_string(const std::string& s) { out_.write(s.data(), static_cast<std::streamsize>(s.size())); }

  ~BinaryWriter() { out_.flush(); }

 private:
  std::string path_;
  std::ofstream out_;
};

Eigen::MatrixXd read_matrix(BinaryReader& reader, Eigen::Index rows, Eigen::Index cols) {
  std::vector<float> buf(static_cast<std::size_t>(rows * cols));
  reader.read_f32(buf.data(), buf.size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(r, c) = static_cast<double>(buf[static_cast<std::size_t>(r * cols + c)]);
    }
  }
  return m;
}

void write_matrix(BinaryWriter& writer, const Eigen::MatrixXd& m) {
  std::vector<float> buf(static_cast<std::size_t>(m.rows() * m.cols()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      buf[static_cast<std::size_t>(r * m.cols() + c)] = static_cast<float>(m(r, c));
    }
  }
  writer.write_f32(buf.data(), buf.size());
}

}  // namespace

void CorpusManifest::validate() const {
  if (pool_files.empty() || mq_files.empty()) {
    throw ContractViolation("CorpusManifest: at least one pool file and one MQ file required");
  }
}

std::vector<Question> load_questions(const std::string& path) {
  const json j = parse_file(path);
  const json& arr = require(j, "questions", path);
  if (!arr.is_array()) {
    throw ParseError(path + ": \"questions\" must be an array");
  }
  std::vector<Question> out;
  out.reserve(arr.size());
  std::unordered_set<std::int64_t> seen;
  for (const auto& item : arr) {
    Question q;
    q.question_id = require(item, "question_id", path).get<std::int64_t>();
    q.image_id = require(item, "image_id", path).get<std::int64_t>();
    q.text = require(item, "question", path).get<std::string>();
    if (trimmed(q.text).empty()) {
      throw ParseError(path + ": question " + std::to_string(q.question_id) + " has empty text");
    }
    if (!seen.insert(q.question_id).second) {
      throw DuplicateId(path + ": duplicate question_id " + std::to_string(q.question_id));
    }
    out.push_back(std::move(q));
  }
  return out;
}

void write_questions(const std::string& path, const std::vector<Question>& questions) {
  json arr = json::array();
  for (const auto& q : questions) {
    arr.push_back({{"question_id", q.question_id}, {"image_id", q.image_id}, {"question", q.text}});
  }
  dump_file(path, json{{"questions", std::move(arr)}});
}

void assemble_corpus(const CorpusManifest& manifest, std::vector<Question>* pool,
                     std::vector<Question>* mqs) {
  manifest.validate();
  auto load_side = [](const std::vector<std::string>& files, const char* side) {
    std::vector<Question> out;
    std::unordered_set<std::int64_t> seen;
    for (const auto& file : files) {
      for (auto& q : load_questions(file)) {
        if (!seen.insert(q.question_id).second) {
          throw DuplicateId(std::string(side) + ": duplicate question_id " +
                            std::to_string(q.question_id) + " across files");
        }
        out.push_back(std::move(q));
      }
    }
    return out;
  };
  if (pool != nullptr) *pool = load_side(manifest.pool_files, "pool");
  if (mqs != nullptr) *mqs = load_side(manifest.mq_files, "main questions");
}

embedding::GruWeights load_gru_weights(const std::string& path) {
  BinaryReader reader(path);
  reader.expect_magic("BQGRU1");
  const auto hidden = static_cast<Eigen::Index>(reader.read_u32());
  const auto embed = static_cast<Eigen::Index>(reader.read_u32());
  const auto vocab = reader.read_u32();
  if (hidden == 0 || embed == 0) {
    throw ParseError(path + ": zero dimension in header");
  }
  embedding::GruWeights w;
  w.u_r = read_matrix(reader, hidden, hidden);
  w.u_z = read_matrix(reader, hidden, hidden);
  w.u = read_matrix(reader, hidden, hidden);
  w.w_r = read_matrix(reader, hidden, embed);
  w.w_z = read_matrix(reader, hidden, embed);
  w.w = read_matrix(reader, hidden, embed);
  w.unknown_vector = read_matrix(reader, embed, 1).col(0);
  for (std::uint32_t i = 0; i < vocab; ++i) {
    const auto len = reader.read_u16();
    std::string token = reader.read_string(len);
    Eigen::VectorXd vec = read_matrix(reader, embed, 1).col(0);
    if (!w.word_vectors.emplace(std::move(token), std::move(vec)).second) {
      throw DuplicateId(path + ": duplicate vocabulary token");
    }
  }
  w.validate();
  return w;
}

void write_gru_weights(const std::string& path, const embedding::GruWeights& weights) {
  weights.validate();
  BinaryWriter writer(path);
  writer.write_magic("BQGRU1");
  writer.write_u32(static_cast<std::uint32_t>(weights.hidden_dim()));
  writer.write_u32(static_cast<std::uint32_t>(weights.embed_dim()));
  writer.write_u32(static_cast<std::uint32_t>(weights.word_vectors.size()));
  write_matrix(writer, weights.u_r);
  write_matrix(writer, weights.u_z);
  write_matrix(writer, weights.u);
  write_matrix(writer, weights.w_r);
  write_matrix(writer, weights.w_z);
  write_matrix(writer, weights.w);
  write_matrix(writer, weights.unknown_vector);
  // Deterministic output regardless of hash-map iteration order.
  std::vector<const std::string*> tokens;
  tokens.reserve(weights.word_vectors.size());
  for (const auto& [token, vec] : weights.word_vectors) tokens.push_back(&token);
  std::sort(tokens.begin(), tokens.end(),
            [](const std::string* a, const std::string* b) { return *a < *b; });
  for (const std::string* token : tokens) {
    if (token->size() > 0xffff) {
      throw Error("token too long for weight file: " + *token);
    }
    writer.write_u16(static_cast<std::uint16_t>(token->size()));
    writer.write_string(*token);
    write_matrix(writer, weights.word_vectors.at(*token));
  }
}

lasso::Dictionary load_embeddings(const std::string& matrix_path, const std::string& sidecar_path) {
  BinaryReader reader(matrix_path);
  reader.expect_magic("BQMAT1");
  const auto dim = static_cast<Eigen::Index>(reader.read_u32());
  const auto count = static_cast<Eigen::Index>(reader.read_u32());
  if (dim == 0) {
    throw ParseError(matrix_path + ": zero dimension in header");
  }
  Eigen::MatrixXd columns(dim, count);
  std::vector<float> buf(static_cast<std::size_t>(dim));
  for (Eigen::Index c = 0; c < count; ++c) {
    reader.read_f32(buf.data(), buf.size());
    for (Eigen::Index r = 0; r < dim; ++r) {
      columns(r, c) = static_cast<double>(buf[static_cast<std::size_t>(r)]);
    }
  }

  const json sidecar = parse_file(sidecar_path);
  if (!sidecar.is_array()) {
    throw ParseError(sidecar_path + ": sidecar must be a JSON array of question_ids");
  }
  if (static_cast<Eigen::Index>(sidecar.size()) != count) {
    throw CountMismatch(sidecar_path + ": sidecar lists " + std::to_string(sidecar.size()) +
                        " ids, matrix holds " + std::to_string(count) + " vectors");
  }
  std::vector<std::int64_t> ids;
  ids.reserve(sidecar.size());
  for (const auto& id : sidecar) {
    ids.push_back(id.get<std::int64_t>());
  }
  return lasso::Dictionary::build(std::move(columns), std::move(ids));
}

void write_embeddings(const std::string& matrix_path, const std::string& sidecar_path,
                      const lasso::Dictionary& dict) {
  BinaryWriter writer(matrix_path);
  writer.write_magic("BQMAT1");
  writer.write_u32(static_cast<std::uint32_t>(dict.dim()));
  writer.write_u32(static_cast<std::uint32_t>(dict.size()));
  std::vector<float> buf(static_cast<std::size_t>(dict.dim()));
  for (int c = 0; c < dict.size(); ++c) {
    for (int r = 0; r < dict.dim(); ++r) {
      buf[static_cast<std::size_t>(r)] = static_cast<float>(dict.columns(r, c));
    }
    writer.write_f32(buf.data(), buf.size());
  }
  dump_file(sidecar_path, json(dict.question_ids));
}

void write_bqd(const std::string& path, const BqdFile& file) {
  json entries = json::array();
  for (const auto& entry : file.entries) {
    json bqs = json::array();
    for (const auto& scored : entry.ranked) {
      bqs.push_back({{"question_id", scored.bq.question_id},
                     {"text", scored.bq.text},
                     {"score", scored.score}});
    }
    entries.push_back({{"image_id", entry.image_id},
                       {"question_id", entry.mq.question_id},
                       {"mq", entry.mq.text},
                       {"bqs", std::move(bqs)}});
  }
  dump_file(path, json{{"ranker", file.ranker}, {"k", file.k}, {"entries", std::move(entries)}});
}

BqdFile read_bqd(const std::string& path) {
  const json j = parse_file(path);
  BqdFile file;
  file.ranker = require(j, "ranker", path).get<std::string>();
  file.k = require(j, "k", path).get<int>();
  for (const auto& item : require(j, "entries", path)) {
    bqd::BqdEntry entry;
    entry.image_id = require(item, "image_id", path).get<std::int64_t>();
    entry.mq.question_id = require(item, "question_id", path).get<std::int64_t>();
    entry.mq.image_id = entry.image_id;
    entry.mq.text = require(item, "mq", path).get<std::string>();
    for (const auto& bq : require(item, "bqs", path)) {
      bqd::ScoredBq scored;
      scored.bq.question_id = require(bq, "question_id", path).get<std::int64_t>();
      scored.bq.text = require(bq, "text", path).get<std::string>();
      scored.score = require(bq, "score", path).get<double>();
      entry.ranked.push_back(std::move(scored));
    }
    file.entries.push_back(std::move(entry));
  }
  return file;
}

std::vector<scoring::AnswerSet> load_annotations(const std::string& path) {
  const json j = parse_file(path);
  std::vector<scoring::AnswerSet> out;
  std::unordered_set<std::int64_t> seen;
  for (const auto& item : require(j, "annotations", path)) {
    scoring::AnswerSet set;
    set.question_id = require(item, "question_id", path).get<std::int64_t>();
    set.answer_type = require(item, "answer_type", path).get<std::string>();
    if (set.answer_type != "yes/no" && set.answer_type != "number" && set.answer_type != "other") {
      throw ParseError(path + ": unknown answer_type \"" + set.answer_type + "\"");
    }
    for (const auto& answer : require(item, "answers", path)) {
      set.answers.push_back(
          scoring::normalize_answer(require(answer, "answer", path).get<std::string>()));
    }
    if (set.answers.size() < 3) {
      throw ParseError(path + ": question " + std::to_string(set.question_id) +
                       " has fewer than 3 answers");
    }
    if (!seen.insert(set.question_id).second) {
      throw DuplicateId(path + ": duplicate annotation for question_id " +
                        std::to_string(set.question_id));
    }
    out.push_back(std::move(set));
  }
  return out;
}

std::vector<scoring::Prediction> load_predictions(const std::string& path) {
  const json j = parse_file(path);
  if (!j.is_array()) {
    throw ParseError(path + ": prediction file must be a JSON array");
  }
  std::vector<scoring::Prediction> out;
  out.reserve(j.size());
  for (const auto& item : j) {
    scoring::Prediction pred;
    pred.question_id = require(item, "question_id", path).get<std::int64_t>();
    pred.answer = scoring::normalize_answer(require(item, "answer", path).get<std::string>());
    out.push_back(std::move(pred));
  }
  return out;
}

void write_predictions(const std::string& path, const std::vector<scoring::Prediction>& preds) {
  json arr = json::array();
  for (const auto& pred : preds) {
    arr.push_back({{"question_id", pred.question_id}, {"answer", pred.answer}});
  }
  dump_file(path, arr);
}

void write_report_json(const std::string& path, const scoring::AccuracyReport& report) {
  json per_type = json::object();
  for (const auto& [type, value] : report.per_type) {
    per_type[type] = value;
  }
  dump_file(path, json{{"overall", report.overall},
                       {"per_type", std::move(per_type)},
                       {"n", report.n},
                       {"missing_predictions", report.missing_predictions}});
}

scoring::AccuracyReport read_report_json(const std::string& path) {
  const json j = parse_file(path);
  scoring::AccuracyReport report;
  report.overall = require(j, "overall", path).get<double>();
  report.n = require(j, "n", path).get<std::int64_t>();
  if (auto it = j.find("missing_predictions"); it != j.end()) {
    report.missing_predictions = it->get<std::int64_t>();
  }
  if (auto it = j.find("per_type"); it != j.end()) {
    for (const auto& [type, value] : it->items()) {
      report.per_type[type] = value.get<double>();
    }
  }
  return report;
}

namespace {

std::string csv_row(const std::string& label, const scoring::AccuracyReport& report,
                    const std::string& diff) {
  auto cell = [&](const char* type) {
    auto it = report.per_type.find(type);
    return it == report.per_type.end() ? std::string() : format_double(it->second);
  };
  return label + "," + format_double(report.overall) + "," + cell("other") + "," +
         cell("number") + "," + cell("yes/no") + "," + diff + "\n";
}

}  // namespace

void write_report_csv(const std::string& path, const std::string& label,
                      const scoring::AccuracyReport& report) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw Error("cannot write " + path);
  }
  out << "partition,All,Other,Num,Y/N,diff\n" << csv_row(label, report, "");
}

void write_partition_csv(const std::string& path, const scoring::AccuracyReport& clean,
                         const std::vector<scoring::AccuracyReport>& partitions,
                         const std::array<double, 7>& diffs) {
  if (partitions.size() != diffs.size()) {
    throw WrongPartitionCount("write_partition_csv: expected 7 partition reports");
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw Error("cannot write " + path);
  }
  out << "partition,All,Other,Num,Y/N,diff\n" << csv_row("clean", clean, "");
  for (std::size_t i = 0; i < partitions.size(); ++i) {
    out << csv_row(std::to_string(i + 1), partitions[i], format_double(diffs[i]));
  }
}

}  // namespace bqrobust::io
