generate: function(scope) {
    var self = this;
    return self.generateIntoBuffer(function(buffer) {
        buffer.write("[");
        codegenUtils.writeToBufferWithDelimiter(self.items, ",", 
                                                buffer, scope);
        return buffer.write("]");
    });
}
