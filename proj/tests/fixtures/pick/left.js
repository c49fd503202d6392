// pick the larger value
function pick(y, z) {
  let x = max(y, 11)
  return x
}
