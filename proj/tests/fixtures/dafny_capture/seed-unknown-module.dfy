// dafny-mock: seed-unknown-module
import System

method Main()
{
  print "hi";
}
