#pragma once

#include <stdexcept>
#include <string>

namespace placegen {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : Error { using Error::Error; };
struct EmptyMesh : Error { using Error::Error; };
struct NotWatertight : Error { using Error::Error; };
struct ResolutionTooCoarse : Error { using Error::Error; };
struct DegenerateGeometry : Error { using Error::Error; };
struct WindowTooShort : Error { using Error::Error; };
struct NoSeparation : Error { using Error::Error; };
struct SchemaMismatch : Error { using Error::Error; };
struct CorruptFile : Error { using Error::Error; };
struct SpecMismatch : Error { using Error::Error; };
struct NonEmptyRequired : Error { using Error::Error; };
struct NoValidElites : Error { using Error::Error; };
struct MissingLabels : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

} // namespace placegen
