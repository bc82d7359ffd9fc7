#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace adderlab
{

enum class error_kind
{
  parse_error,
  io_error,
  duplicate_cell,
  invalid_spec,
  arity_mismatch,
  unknown_cell,
  combinational_loop,
  invalid_netlist,
  invalid_width,
  odd_width,
  partition_mismatch,
  invalid_partition,
  group_too_small,
  empty_block,
  width_overflow,
  invalid_params,
  non_positive_metric,
  empty_input,
  divide_by_zero,
  verification_failed
};

inline std::string_view to_string( error_kind kind )
{
  switch ( kind )
  {
  case error_kind::parse_error: return "ParseError";
  case error_kind::io_error: return "IOError";
  case error_kind::duplicate_cell: return "DuplicateCell";
  case error_kind::invalid_spec: return "InvalidSpec";
  case error_kind::arity_mismatch: return "ArityMismatch";
  case error_kind::unknown_cell: return "UnknownCell";
  case error_kind::combinational_loop: return "CombinationalLoop";
  case error_kind::invalid_netlist: return "InvalidNetlist";
  case error_kind::invalid_width: return "InvalidWidth";
  case error_kind::odd_width: return "OddWidth";
  case error_kind::partition_mismatch: return "PartitionMismatch";
  case error_kind::invalid_partition: return "InvalidPartition";
  case error_kind::group_too_small: return "GroupTooSmall";
  case error_kind::empty_block: return "EmptyBlock";
  case error_kind::width_overflow: return "WidthOverflow";
  case error_kind::invalid_params: return "InvalidParams";
  case error_kind::non_positive_metric: return "NonPositiveMetric";
  case error_kind::empty_input: return "EmptyInput";
  case error_kind::divide_by_zero: return "DivideByZero";
  case error_kind::verification_failed: return "VerificationFailed";
  }
  return "Unknown";
}

/*! \brief Exception carrying a machine-checkable error kind. */
class error : public std::runtime_error
{
public:
  error( error_kind kind, std::string const& message )
      : std::runtime_error( std::string( to_string( kind ) ) + ": " + message ), kind_( kind ), message_( message )
  {
  }

  /* message without the kind prefix */
  std::string const& message() const noexcept
  {
    return message_;
  }

  error_kind kind() const noexcept
  {
    return kind_;
  }

private:
  error_kind kind_;
  std::string message_;
};

} // namespace adderlab
