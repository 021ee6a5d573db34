#pragma once

// Command-line surface: input files, analysis dispatch and report writing.
// run() is the whole program; main() only forwards argv.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "pencil_lab/core.hpp"
#include "pencil_lab/matpoly.hpp"

namespace pencil_lab::cli {

enum ExitCode : int { kOk = 0, kParseError = 2, kPrecondition = 3, kAmbiguity = 4, kInternal = 5 };

/// Malformed input: message already carries file and position.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Input {
    enum class Kind { pencil, posh, polynomial };
    Kind kind = Kind::pencil;
    std::optional<Pencil> pencil;            // pencil and posh files
    std::optional<PoshPencil> posh;          // posh files
    std::optional<MatrixPolynomial> polynomial;
    nlohmann::json document;
    std::string name;
};

const char* to_string(Input::Kind k);

/// Parses a pencil, posH or polynomial document. Throws InputError with
/// "name:line:col" for syntax errors and "name: /json/pointer" for schema errors.
Input parse_input(const std::string& text, const std::string& name);
Input read_input(const std::string& path);

/// Writes via a temporary file in the same directory and renames it into place.
void write_atomic(const std::string& path, const std::string& content);

/// Flag beats PENCIL_LAB_SEED beats the library default.
std::uint64_t resolve_seed(std::optional<std::uint64_t> flag);

nlohmann::json to_json(Complex z);
nlohmann::json to_json(const ComplexMatrix& m);

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pencil_lab::cli
