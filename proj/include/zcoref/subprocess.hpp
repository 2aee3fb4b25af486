#ifndef ZCOREF_SUBPROCESS_HPP
#define ZCOREF_SUBPROCESS_HPP

#include <string>
#include <vector>

#include "zcoref/harness.hpp"

namespace zcoref {

struct SubprocessError : Error {
  using Error::Error;
};

// One-shot JSON exchange: the request is written to the child's stdin (then
// closed), the response read from its stdout. Protocol v1:
//   request  {"v":1, "op":"resolve"|"identify", "doc":{...}}
//   response {"v":1, "clusters":[...]} or {"v":1, "gaps":[[sent,gap],...]}
std::string run_subprocess(const std::vector<std::string>& argv, const std::string& input);

class SubprocessCoref : public CorefResolver {
 public:
  explicit SubprocessCoref(std::vector<std::string> argv) : argv_(std::move(argv)) {}
  ClusterSet resolve(const Document& doc) override;

 private:
  std::vector<std::string> argv_;
};

class SubprocessAzpIdentifier : public AzpIdentifier {
 public:
  explicit SubprocessAzpIdentifier(std::vector<std::string> argv) : argv_(std::move(argv)) {}
  std::vector<Azp> identify(const Document& doc) override;

 private:
  std::vector<std::string> argv_;
};

}  // namespace zcoref

#endif
