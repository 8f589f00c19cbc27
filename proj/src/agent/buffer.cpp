#include "ferry/agent/buffer.hpp"

#include <algorithm>

namespace ferry::agent {

BufferLedger::BufferLedger(int capacity) : capacity_(capacity) {
  if (capacity <= 0)
    throw std::invalid_argument("buffer capacity must be positive");
}

int BufferLedger::replay(const std::vector<TransferEvent>& history) {
  int stored = 0;
  for (const TransferEvent& e : history) {
    switch (e.kind) {
      case TransferKind::Gather:
      case TransferKind::TransferIn:
        stored += e.units;
        break;
      case TransferKind::TransferOut:
      case TransferKind::Upload:
        stored -= e.units;
        break;
    }
  }
  return stored;
}

std::vector<Batch> BufferLedger::pop_front_units(int units) {
  std::vector<Batch> out;
  while (units > 0) {
    Batch& front = batches_.front();
    const int take = std::min(front.units, units);
    if (!out.empty() && out.back().data_type == front.data_type)
      out.back().units += take;
    else
      out.push_back({front.data_type, take});
    front.units -= take;
    stored_ -= take;
    units -= take;
    if (front.units == 0) batches_.pop_front();
  }
  return out;
}

void apply_gather(BufferLedger& b, int units, int data_type, double t) {
  if (units < 0) throw std::invalid_argument("negative gather");
  if (units == 0) return;  // idle action
  if (b.stored_ + units > b.capacity_)
    throw ProtocolViolation("buffer overflow: stored " +
                            std::to_string(b.stored_) + " + " +
                            std::to_string(units) + " exceeds capacity " +
                            std::to_string(b.capacity_) + " at t=" +
                            std::to_string(t));
  b.stored_ += units;
  if (!b.batches_.empty() && b.batches_.back().data_type == data_type)
    b.batches_.back().units += units;
  else
    b.batches_.push_back({data_type, units});
  b.history_.push_back({TransferKind::Gather, units, -1, t, data_type});
}

void apply_transfer(BufferLedger& src, BufferLedger& dst, int units, double t,
                    int src_id, int dst_id) {
  if (units <= 0) throw std::invalid_argument("transfer units must be > 0");
  if (units > src.stored_)
    throw std::invalid_argument("transfer exceeds stored data");
  if (dst.stored_ + units > dst.capacity_)
    throw std::invalid_argument("transfer would overflow destination");
  for (const Batch& batch : src.pop_front_units(units)) {
    src.history_.push_back(
        {TransferKind::TransferOut, batch.units, dst_id, t, batch.data_type});
    dst.history_.push_back(
        {TransferKind::TransferIn, batch.units, src_id, t, batch.data_type});
    if (!dst.batches_.empty() &&
        dst.batches_.back().data_type == batch.data_type)
      dst.batches_.back().units += batch.units;
    else
      dst.batches_.push_back(batch);
    dst.stored_ += batch.units;
  }
}

std::vector<Batch> apply_upload(BufferLedger& b, int units, double t,
                                int center_id) {
  if (units <= 0) throw std::invalid_argument("upload units must be > 0");
  if (units > b.stored_)
    throw std::invalid_argument("upload exceeds stored data");
  auto out = b.pop_front_units(units);
  for (const Batch& batch : out)
    b.history_.push_back(
        {TransferKind::Upload, batch.units, center_id, t, batch.data_type});
  return out;
}

}  // namespace ferry::agent
