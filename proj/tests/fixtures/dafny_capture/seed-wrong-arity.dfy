// dafny-mock: seed-wrong-arity
function Double(x: int): int { 2 * x }

method M() returns (r: int)
{
  r := Double(1, 2);
}
