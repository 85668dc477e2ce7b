#include "hgff/cli.hpp"

int main(int argc, char** argv) { return hgff::parse_and_dispatch(argc, argv); }
