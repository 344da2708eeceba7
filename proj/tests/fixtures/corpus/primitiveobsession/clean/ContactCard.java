package corpus.primitiveobsession.clean;

public class ContactCard {
    private Name name;
    private Phone phone;
    private int zipCode;
    private String city;

    public void parse(String line) {
        String[] parts = line.split(";");
        name = new Name(parts[0], parts[1]);
        phone = new Phone(parts[2], parts[3]);
        zipCode = Integer.parseInt(parts[4]);
        city = parts[5];
    }

    public String display() {
        return name.full() + " " + phone.formatted() + ", " + zipCode + " " + city;
    }
}

class Name {
    private String first;
    private String last;

    Name(String first, String last) {
        this.first = first;
        this.last = last;
    }

    public String full() {
        return first + " " + last;
    }
}

class Phone {
    private String area;
    private String number;

    Phone(String area, String number) {
        this.area = area;
        this.number = number;
    }

    public String formatted() {
        return "(" + area + ") " + number;
    }
}
