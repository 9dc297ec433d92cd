#pragma once

#include <stdexcept>
#include <string>

namespace iqn {

// Error kinds mirror the status codes of the public C API one-to-one.
enum class ErrorKind {
  Io,
  Parse,
  Dimension,
  Tiling,
  Config,
  Selection,
  MissingScore,
  ExternalCodec,
  ModelFormat,
  Internal,
};

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

private:
  ErrorKind kind_;
};

#define IQN_DEFINE_ERROR(Name, Kind)                                        \
  class Name : public Error {                                               \
  public:                                                                   \
    explicit Name(const std::string& what) : Error(ErrorKind::Kind, what) {} \
  }

IQN_DEFINE_ERROR(IoError, Io);
IQN_DEFINE_ERROR(ParseError, Parse);
IQN_DEFINE_ERROR(DimensionError, Dimension);
IQN_DEFINE_ERROR(TilingError, Tiling);
IQN_DEFINE_ERROR(ConfigError, Config);
IQN_DEFINE_ERROR(SelectionError, Selection);
IQN_DEFINE_ERROR(MissingScoreError, MissingScore);
IQN_DEFINE_ERROR(ExternalCodecError, ExternalCodec);
IQN_DEFINE_ERROR(ModelFormatError, ModelFormat);

#undef IQN_DEFINE_ERROR

}  // namespace iqn
