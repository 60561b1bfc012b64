#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "laser/schema.h"
#include "laser/status.h"
#include "laser/types.h"

namespace laser {
namespace bench {

// HTAP workload: steady inserts (Q1), point reads of recent (Q2a) and
// older (Q2b) keys, single-column updates of recent keys (Q3) and two
// analytical range scans (Q4, Q5).
enum class QueryClass : uint8_t { kQ1 = 0, kQ2a, kQ2b, kQ3, kQ4, kQ5 };
inline constexpr int kNumQueryClasses = 6;
const char* QueryClassName(QueryClass q);

struct WorkloadSpec {
  static constexpr int kVersion = 1;

  int columns = 8;
  uint64_t load_rows = 4000000;
  uint64_t steady_inserts = 100000;
  // Q3 operations per Q1 insert.
  double update_ratio = 0.01;
  uint64_t q2a_count = 5000;
  uint64_t q2b_count = 5000;
  uint64_t q4_count = 12;
  uint64_t q5_count = 12;

  // Empty means the default for `columns` (see ResolveProjections).
  ColumnSet q2a_proj;
  ColumnSet q2b_proj;
  ColumnSet q4_proj;
  ColumnSet q5_proj;

  // Normal over normalized insertion rank, 1 = newest.
  double q2a_mean = 0.98;
  double q2b_mean = 0.85;
  double q3_mean = 0.98;
  double recency_stddev = 0.02;

  // Fraction of the key space each scan covers.
  double q4_selectivity = 0.05;
  double q5_selectivity = 0.50;

  uint64_t seed = 1;

  // Engine shape. levels = 0 picks the fewest levels for the final row
  // count given pg; pg = 0 picks the smallest pg that fits `levels`.
  int T = 2;
  int block_size = 4096;
  int K = 4;
  int levels = 6;
  int64_t pg = 0;
  double dt_size = 8.0;

  // Client threads for reads and scans outside deterministic mode.
  int reader_threads = 4;

  Schema schema() const;
  // Fills empty projections with the defaults for `columns`: Q2a all
  // columns, Q2b the upper half, Q4 the top third, Q5 the top tenth.
  void ResolveProjections();
  // Multiplies every operation count by `factor`; non-zero counts stay >= 1.
  void Scale(double factor);
  // Lowers Q2a/Q2b recency means by `offset` (older keys).
  void ShiftReads(double offset);
  // Moves Q4/Q5 projections `offset` columns towards column 1.
  void ShiftScans(int offset);
  Status Validate() const;
  Status MakeParams(TreeParams* params) const;
  uint64_t TotalRows() const { return load_rows + steady_inserts; }
  uint64_t UpdateCount() const;
};

// Versioned "key = value" text; '#' starts a comment.
std::string FormatSpec(const WorkloadSpec& spec);
Status ParseSpec(const std::string& text, WorkloadSpec* spec);
Status LoadSpec(const std::string& path, WorkloadSpec* spec);
// Stable hash of the normalized spec text.
uint64_t SpecHash(const WorkloadSpec& spec);

// Bijection on [0, 2^40) used to spread insertion order over the key space.
Key KeyForIndex(uint64_t index);
inline constexpr uint64_t kKeySpace = uint64_t{1} << 40;
// Deterministic column value of an inserted row.
Value InsertValue(Key key, ColumnId column);

struct Operation {
  QueryClass query = QueryClass::kQ1;
  Key key = 0;  // scan lower bound
  Key hi = 0;   // scan upper bound
  ColumnSet projection;
  ColumnId column = 0;  // Q3 target
  Value value = 0;      // Q3 value
  double recency = 0;   // Q2a/Q2b/Q3 draw after clamping
  uint64_t insert_index = 0;

  std::string Encode() const;
};

enum class Phase { kLoad, kSteady };

// Produces the operation stream of one phase. Deterministic in the spec.
class WorkloadGenerator {
 public:
  WorkloadGenerator(const WorkloadSpec& spec, Phase phase);

  bool Next(Operation* op);
  uint64_t remaining() const { return remaining_total_; }
  uint64_t inserted() const { return inserted_; }

 private:
  Key RecentKey(double mean, double* recency);

  WorkloadSpec spec_;
  Phase phase_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  uint64_t remaining_[kNumQueryClasses] = {};
  uint64_t remaining_total_ = 0;
  uint64_t inserted_ = 0;
};

}  // namespace bench
}  // namespace laser
