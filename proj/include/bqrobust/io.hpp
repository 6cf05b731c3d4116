#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bqrobust/bqd.hpp"
#include "bqrobust/embedding.hpp"
#include "bqrobust/lasso.hpp"
#include "bqrobust/question.hpp"
#include "bqrobust/scoring.hpp"

namespace bqrobust::io {

// Where a corpus lives on disk: training+validation question files form the
// candidate pool, test question files the main questions.
struct CorpusManifest {
  std::vector<std::string> pool_files;
  std::vector<std::string> mq_files;
  std::optional<std::string> annotation_file;
  std::optional<std::string> embedding_file;
  std::optional<std::string> weight_file;

  void validate() const;  // at least one pool file and one MQ file
};

/// Reads a VQA-format question file: {"questions": [{"question_id", "image_id",
/// "question"}, ...]}. Duplicate question_ids are rejected.
std::vector<Question> load_questions(const std::string& path);
void write_questions(const std::string& path, const std::vector<Question>& questions);

/// Concatenates all pool files and all MQ files of the manifest, rejecting
/// duplicate ids within each side.
void assemble_corpus(const CorpusManifest& manifest, std::vector<Question>* pool,
                     std::vector<Question>* mqs);

// Binary GRU weight file, little-endian: magic "BQGRU1", u32 hidden_dim,
// u32 embed_dim, u32 vocab_size; six row-major f32 matrices U_r,U_z,U,
// W_r,W_z,W; the unknown-token vector; then per vocab entry a u16 byte
// length, the UTF-8 token and embed_dim f32s.
embedding::GruWeights load_gru_weights(const std::string& path);
void write_gru_weights(const std::string& path, const embedding::GruWeights& weights);

// Binary embedding matrix, little-endian: magic "BQMAT1", u32 dim, u32 count,
// then count row-major f32 vectors. The JSON sidecar is a plain array of
// question_ids in matrix order.
lasso::Dictionary load_embeddings(const std::string& matrix_path, const std::string& sidecar_path);
void write_embeddings(const std::string& matrix_path, const std::string& sidecar_path,
                      const lasso::Dictionary& dict);

struct BqdFile {
  std::string ranker;
  int k = bqd::kDefaultTopK;
  std::vector<bqd::BqdEntry> entries;
};

void write_bqd(const std::string& path, const BqdFile& file);
BqdFile read_bqd(const std::string& path);

/// Annotation file {"annotations": [{"question_id", "answer_type",
/// "answers": [{"answer": ...} x A]}]}; answers are normalized on load.
std::vector<scoring::AnswerSet> load_annotations(const std::string& path);

/// Prediction file [{"question_id", "answer"}]; answers normalized on load.
std::vector<scoring::Prediction> load_predictions(const std::string& path);
void write_predictions(const std::string& path, const std::vector<scoring::Prediction>& preds);

void write_report_json(const std::string& path, const scoring::AccuracyReport& report);
scoring::AccuracyReport read_report_json(const std::string& path);

/// Single-report CSV with the columns partition,All,Other,Num,Y/N,diff.
void write_report_csv(const std::string& path, const std::string& label,
                      const scoring::AccuracyReport& report);

/// Partition-series CSV (clean row plus one row per partition) in the same
/// column layout, suitable for plotting accuracy against noise level.
void write_partition_csv(const std::string& path, const scoring::AccuracyReport& clean,
                         const std::vector<scoring::AccuracyReport>& partitions,
                         const std::array<double, 7>& diffs);

}  // namespace bqrobust::io
