// pick the larger value
function pick(y, z) {
  var x = max(y, 11, z)
  return x
}
