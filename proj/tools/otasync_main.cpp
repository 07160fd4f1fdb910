// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "otasync/cli.hpp"

int main(int argc, char** argv) {
    return otasync::cli::parse_and_dispatch(argc, argv, std::cout, std::cerr);
}
