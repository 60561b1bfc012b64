#include "compaction.h"

#include <algorithm>

namespace laser {

BusyMap MakeBusyMap(const LayoutConfig& layout) {
  BusyMap m(layout.num_levels());
  m[0].assign(1, false);
  for (int i = 1; i < layout.num_levels(); i++) m[i].assign(layout.num_groups(i), false);
  return m;
}

void CompactionJob::MarkBusy(BusyMap* busy, bool value) const {
  (*busy)[level][group] = value;
  for (int c : children) (*busy)[level + 1][c] = value;
}

namespace {

double RunBytes(const std::vector<FileRef>& run, double dt) {
  double b = 0;
  for (const auto& f : run) b += f->NominalBytes(dt);
  return b;
}

double GroupCapacity(const Options& o, int level, const ColumnSet& g) {
  return double(o.params.LevelCapacity(level)) * (1 + g.Size()) * o.schema.dt_size;
}

}  // namespace

std::vector<double> GroupScores(const Version& v, const Options& o, int level) {
  std::vector<double> out;
  const auto& groups = o.layout.groups(level);
  for (int g = 0; g < static_cast<int>(groups.size()); g++) {
    out.push_back(RunBytes(v.run(level, g), o.schema.dt_size) / GroupCapacity(o, level, groups[g]));
  }
  return out;
}

std::vector<double> LevelScores(const Version& v, const Options& o) {
  const int L = o.layout.L();
  std::vector<double> out(L, 0.0);
  out[0] = double(v.level0().size()) / o.params.K;
  for (int i = 1; i < L; i++) {
    double bytes = 0, cap = 0;
    const auto& groups = o.layout.groups(i);
    for (int g = 0; g < static_cast<int>(groups.size()); g++) {
      bytes += RunBytes(v.run(i, g), o.schema.dt_size);
      cap += GroupCapacity(o, i, groups[g]);
    }
    out[i] = bytes / cap;
  }
  return out;
}

namespace {

void FillChildren(const Version& v, const Options& o, CompactionJob* job) {
  Key lo = ~Key{0}, hi = 0;
  for (const auto& f : job->inputs) {
    lo = std::min(lo, f->smallest);
    hi = std::max(hi, f->largest);
  }
  job->children = job->level == 0 ? [&] {
    std::vector<int> all(o.layout.num_groups(1));
    for (size_t g = 0; g < all.size(); g++) all[g] = static_cast<int>(g);
    return all;
  }()
                                  : o.layout.ChildrenOf(job->level, job->group);
  job->child_inputs.clear();
  for (int c : job->children) job->child_inputs.push_back(v.Overlapping(job->level + 1, c, lo, hi));
  job->bottommost = job->level + 1 == o.layout.L();
}

bool ChildrenFree(const Options& o, const BusyMap& busy, int level, int group) {
  if (busy[level][group]) return false;
  if (level == 0) {
    for (bool b : busy[1]) {
      if (b) return false;
    }
    return true;
  }
  for (int c : o.layout.ChildrenOf(level, group)) {
    if (busy[level + 1][c]) return false;
  }
  return true;
}

}  // namespace

bool PickCompaction(const Version& v, const Options& o, const BusyMap& busy, CompactionJob* job) {
  std::vector<double> scores = LevelScores(v, o);
  std::vector<int> order;
  for (int i = 0; i < static_cast<int>(scores.size()); i++) {
    bool needs = i == 0 ? scores[i] >= 1.0 : scores[i] > 1.0;
    if (needs) order.push_back(i);
  }
  // Most overflowing first; ties go to the lower level.
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return scores[a] > scores[b]; });
  for (int level : order) {
    if (level == 0) {
      if (!ChildrenFree(o, busy, 0, 0)) continue;
      *job = CompactionJob();
      job->level = 0;
      job->inputs = v.level0();
      FillChildren(v, o, job);
      return true;
    }
    std::vector<double> gs = GroupScores(v, o, level);
    std::vector<int> groups;
    for (int g = 0; g < static_cast<int>(gs.size()); g++) {
      if (gs[g] > 1.0 && !v.run(level, g).empty()) groups.push_back(g);
    }
    std::stable_sort(groups.begin(), groups.end(), [&](int a, int b) { return gs[a] > gs[b]; });
    for (int g : groups) {
      if (!ChildrenFree(o, busy, level, g)) continue;
      const auto& run = v.run(level, g);
      const FileRef* pick = &run[0];
      for (const auto& f : run) {
        bool better = o.priority == CompactionPriority::kOldestFirst
                          ? f->min_seq < (*pick)->min_seq
                          : f->file_size > (*pick)->file_size;
        if (better) pick = &f;
      }
      *job = CompactionJob();
      job->level = level;
      job->group = g;
      job->inputs = {*pick};
      FillChildren(v, o, job);
      return true;
    }
  }
  return false;
}

bool WholeRunJob(const Version& v, const Options& o, int level, int group, CompactionJob* job) {
  *job = CompactionJob();
  job->level = level;
  job->group = group;
  job->inputs = level == 0 ? v.level0() : v.run(level, group);
  if (job->inputs.empty()) return false;
  FillChildren(v, o, job);
  return true;
}

bool ResolveOutput(const RowMerger& m, const ColumnSet& columns, bool bottommost, Key key,
                   OwnedEntry* out) {
  ColumnSet vals = m.values() & columns;
  ColumnSet unknown = m.unresolved() & columns;
  ColumnSet resolved = vals | (m.deleted() & columns);
  if (vals.Empty() && (bottommost || !unknown.Empty())) return false;
  out->key = key;
  out->seq = 0;
  resolved.ForEach([&](ColumnId c) { out->seq = std::max(out->seq, m.seq(c)); });
  out->present = vals;
  out->values.clear();
  vals.ForEach([&](ColumnId c) { out->values.push_back(m.value(c)); });
  if (vals.Empty()) {
    out->kind = EntryKind::kTombstone;
  } else if (unknown.Empty() || bottommost) {
    // Nothing older can supply the missing columns at the last level.
    out->kind = EntryKind::kPut;
  } else {
    out->kind = EntryKind::kPartial;
  }
  return true;
}

namespace {

// Writes one run of output SSTs for a group, cutting files at the target
// size.
class OutputRun {
 public:
  OutputRun(const BuildContext& ctx, int level, int group, const ColumnSet& columns,
            uint64_t target_bytes)
      : ctx_(ctx), level_(level), group_(group), columns_(columns), target_(target_bytes) {
    opts_.group = columns;
    opts_.entries_per_block = EntriesPerBlock(ctx.options->schema, ctx.options->params, columns);
    opts_.block_bytes = ctx.options->params.D;
    opts_.bloom_bits_per_key = ctx.options->bloom_bits_per_key;
  }

  Status Add(const EntryView& e) {
    if (builder_ != nullptr && builder_->FileSize() >= target_) {
      Status s = FinishFile();
      if (!s.ok()) return s;
    }
    if (builder_ == nullptr) {
      number_ = ctx_.new_file_number();
      builder_ = std::make_unique<SstBuilder>(SstFileName(ctx_.dir, number_), opts_);
      Status s = builder_->Open();
      if (!s.ok()) return s;
    }
    return builder_->Add(e);
  }

  Status Finish() { return builder_ ? FinishFile() : Status::OK(); }
  void Abandon() {
    if (builder_) builder_->Abandon();
    builder_.reset();
    for (const auto& f : outputs_) RemoveFile(SstFileName(ctx_.dir, f->number));
    outputs_.clear();
  }
  std::vector<FileRef>& outputs() { return outputs_; }
  uint64_t bytes() const { return bytes_; }

 private:
  Status FinishFile() {
    Status s = builder_->Finish();
    if (!s.ok()) return s;
    auto f = std::make_shared<FileMeta>();
    f->number = number_;
    f->level = level_;
    f->group = group_;
    f->columns = columns_;
    s = SstReader::Open(builder_->path(), &f->reader);
    if (!s.ok()) return s;
    const SstProps& p = f->reader->props();
    f->file_size = f->reader->file_size();
    f->smallest = p.smallest;
    f->largest = p.largest;
    f->min_seq = p.min_seq;
    f->max_seq = p.max_seq;
    f->num_entries = p.num_entries;
    f->value_count = p.value_count;
    bytes_ += f->file_size;
    outputs_.push_back(std::move(f));
    builder_.reset();
    return Status::OK();
  }

  const BuildContext& ctx_;
  int level_, group_;
  ColumnSet columns_;
  uint64_t target_;
  SstBuildOptions opts_;
  std::unique_ptr<SstBuilder> builder_;
  uint64_t number_ = 0;
  std::vector<FileRef> outputs_;
  uint64_t bytes_ = 0;
};

}  // namespace

Status RunCompaction(const CompactionJob& job, const BuildContext& ctx, CompactionResult* result) {
  const Options& o = *ctx.options;
  const LayoutConfig& layout = o.layout;
  const int out_level = job.level + 1;
  const Key lo = 0, hi = ~Key{0};

  std::vector<std::unique_ptr<MergeSource>> sources;
  if (job.level == 0) {
    for (const auto& f : job.inputs) {
      sources.push_back(std::make_unique<SstRunSource>(std::vector<FileRef>{f},
                                                       o.schema.AllColumns(), 0, 0, lo, hi,
                                                       nullptr));
    }
  } else {
    sources.push_back(std::make_unique<SstRunSource>(
        job.inputs, layout.groups(job.level)[job.group], job.level, job.group, lo, hi, nullptr));
  }
  std::vector<std::unique_ptr<MergeSource>> child_sources;
  ColumnSet wanted;
  for (size_t k = 0; k < job.children.size(); k++) {
    const ColumnSet& cols = layout.groups(out_level)[job.children[k]];
    wanted |= cols;
    child_sources.push_back(std::make_unique<SstRunSource>(job.child_inputs[k], cols, out_level,
                                                           job.children[k], lo, hi, nullptr));
  }
  sources.push_back(std::make_unique<ColumnMergingIterator>(std::move(child_sources)));

  for (const auto& f : job.inputs) result->bytes_read += f->file_size;
  for (const auto& run : job.child_inputs) {
    for (const auto& f : run) result->bytes_read += f->file_size;
  }

  std::vector<std::unique_ptr<OutputRun>> outs;
  for (int c : job.children) {
    outs.push_back(std::make_unique<OutputRun>(ctx, out_level, c, layout.groups(out_level)[c],
                                               o.target_file_bytes));
  }

  LevelMergingIterator it(std::move(sources));
  it.Seek(lo);
  RowMerger m;
  OwnedEntry out;
  Key key;
  Status s;
  for (;;) {
    m.Reset(wanted);
    if (!it.NextKey(&m, &key)) break;
    for (size_t k = 0; k < outs.size() && s.ok(); k++) {
      if (ResolveOutput(m, layout.groups(out_level)[job.children[k]], job.bottommost, key, &out)) {
        s = outs[k]->Add(out.view());
      }
    }
    if (!s.ok()) break;
  }
  if (s.ok()) s = it.status();
  for (auto& r : outs) {
    if (s.ok()) s = r->Finish();
  }
  if (!s.ok()) {
    for (auto& r : outs) r->Abandon();
    return s;
  }
  for (auto& r : outs) {
    result->bytes_written += r->bytes();
    for (auto& f : r->outputs()) result->outputs.push_back(f);
  }
  return Status::OK();
}

Status BuildLevel0(const MemTable& mem, const BuildContext& ctx, FileRef* out) {
  out->reset();
  const Options& o = *ctx.options;
  const ColumnSet all = o.schema.AllColumns();
  OutputRun run(ctx, 0, 0, all, ~uint64_t{0});
  MemTable::Iterator it(&mem, ~SeqNo{0});
  it.SeekToFirst();
  RowMerger m;
  OwnedEntry e;
  Status s;
  while (it.Valid() && s.ok()) {
    Key key = it.entry().key;
    m.Reset(all);
    for (; it.Valid() && it.entry().key == key; it.Next()) m.Apply(it.entry(), all, -1);
    if (ResolveOutput(m, all, false, key, &e)) s = run.Add(e.view());
  }
  if (s.ok()) s = run.Finish();
  if (!s.ok()) {
    run.Abandon();
    return s;
  }
  if (!run.outputs().empty()) *out = run.outputs()[0];
  return Status::OK();
}

}  // namespace laser
