#pragma once

#include <stdexcept>
#include <string>

namespace litrev {

enum class Errc {
  MalformedRecord,
  DuplicateId,
  EmptyCorpus,
  UnmappedJournal,
  UnassignedDiscipline,
  AuthError,
  RateLimited,
  TransportError,
  EmptyResponse,
  JudgeFormatError,
  SearchUnavailable,
  NoReferencesKey,
  ZeroVector,
  MissingScores,
  ConfigError,
  FatalStorageError,
  InvalidArgument,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
public:
  Error(Errc code, std::string message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

  Errc code() const noexcept { return code_; }

private:
  Errc code_;
};

}  // namespace litrev
