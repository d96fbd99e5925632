#pragma once

#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "wikitools/transport.hpp"

namespace wikitools {

/// Runs the command line tool on `args` (program name excluded). Returns 0
/// on success, 1 when the toolkit reports an error and 2 on a usage error.
///
/// Without `fetcher`, replay mode uses a fetcher that refuses every live
/// request and the other modes go to the network.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            std::shared_ptr<HttpFetcher> fetcher = nullptr);

}  // namespace wikitools
