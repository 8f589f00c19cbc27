// ============================================================================
// agent/buffer.hpp — bounded data buffer with typed FIFO batches
//
// Stores whole data units tagged with an integer type so per-type upload
// totals stay reportable; capacity accounting is type-agnostic.  Overflow on
// gather is a protocol violation (the coordination layer must prevent it),
// so it aborts loudly instead of failing soft.
// ============================================================================
#pragma once

#include <deque>
#include <stdexcept>
#include <string>
#include <vector>

namespace ferry::agent {

struct ProtocolViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class TransferKind { Gather, TransferOut, TransferIn, Upload };

struct TransferEvent {
  TransferKind kind;
  int units;      // > 0
  int peer;       // robot id, data-center id, or -1 when not applicable
  double time;    // seconds
  int data_type;  // integer tag
};

struct Batch {
  int data_type;
  int units;
};

class BufferLedger {
 public:
  explicit BufferLedger(int capacity);

  int capacity() const { return capacity_; }
  int stored() const { return stored_; }
  const std::deque<Batch>& batches() const { return batches_; }
  const std::vector<TransferEvent>& history() const { return history_; }

  /// Net stored units implied by an event history (replay check).
  static int replay(const std::vector<TransferEvent>& history);

  friend void apply_gather(BufferLedger& b, int units, int data_type,
                           double t);
  friend void apply_transfer(BufferLedger& src, BufferLedger& dst, int units,
                             double t, int src_id, int dst_id);
  friend std::vector<Batch> apply_upload(BufferLedger& b, int units, double t,
                                         int center_id);

 private:
  // removes the oldest `units` units, splitting a batch when needed
  std::vector<Batch> pop_front_units(int units);

  int capacity_;
  int stored_ = 0;
  std::deque<Batch> batches_;
  std::vector<TransferEvent> history_;
};

/// Gather `units` of `data_type`; throws ProtocolViolation on overflow.
void apply_gather(BufferLedger& b, int units, int data_type, double t);

/// Move `units` from src to dst, oldest batches first.
void apply_transfer(BufferLedger& src, BufferLedger& dst, int units, double t,
                    int src_id, int dst_id);

/// Remove `units` (oldest first) and return the uploaded batches by type.
std::vector<Batch> apply_upload(BufferLedger& b, int units, double t,
                                int center_id);

}  // namespace ferry::agent
