#include "contact/cli.hpp"

int main(int argc, char** argv) { return contact::cli_main(argc, argv); }
