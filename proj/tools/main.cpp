#include "tofrec/cli.hpp"

int main(int argc, char** argv) { return tofrec::run_cli(argc, argv); }
